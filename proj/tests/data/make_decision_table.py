#!/usr/bin/env python3
# Copyright 2026 The Origin Lens Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes decision_table.tsv: the expected verdict for every evidence cell.

Written from the status rules alone, without reading the C++ code. Rerun
only when the rules change; the output is checked in.
"""
from itertools import product
from pathlib import Path

MANIFEST = ["absent", "parse_error", "invalid_sig", "invalid_binding", "expired", "valid_ai", "valid_plain"]
METADATA = ["ai", "none"]
WATERMARK = ["detected", "none", "skipped"]
CONTEXT = ["hits", "none", "skipped"]

COLOR = {
    "verified": "green",
    "ai_generated": "purple",
    "warning": "orange",
    "invalid": "red",
    "no_data": "gray",
}


def expected(manifest, metadata, watermark, context):
    # A present manifest decides alone; network layers only add reasons.
    if manifest == "invalid_binding":
        return "invalid", "high"  # signature verified, content changed
    if manifest == "invalid_sig":
        return "invalid", "medium"  # no verified signature behind the status
    if manifest == "parse_error":
        return "warning", "low"  # nothing cryptographic was checked
    if manifest == "expired":
        return "warning", "high"
    if manifest == "valid_ai":
        return "ai_generated", "high"
    if manifest == "valid_plain":
        return "verified", "high"
    if metadata == "ai" or watermark == "detected":
        return "ai_generated", "medium"
    if context == "hits":
        return "no_data", "low"
    return "no_data", "none"


def main():
    rows = ["manifest\tmetadata\twatermark\tcontext\tstatus\tcolor\tconfidence"]
    for cell in product(MANIFEST, METADATA, WATERMARK, CONTEXT):
        status, confidence = expected(*cell)
        rows.append("\t".join([*cell, status, COLOR[status], confidence]))
    out = Path(__file__).resolve().parent / "decision_table.tsv"
    out.write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
