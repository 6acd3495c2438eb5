#!/usr/bin/env python3
# SPDX-License-Identifier: MIT
"""Runs the CLI for every method and validates the JSON reports against the schema."""
import json
import subprocess
import sys

import jsonschema

RUNS = [
    ["--model", "y1", "--method", "udr", "--k", "5"],
    ["--model", "y2", "--sigma", "0.2", "--method", "gudr", "--k", "9", "--max-order", "4"],
    ["--model", "y1", "--method", "sosm"],
    ["--model", "y1", "--method", "tosm", "--max-order", "3"],
    ["--model", "y2", "--method", "mc", "--n", "1000", "--seed", "5"],
    ["--model", "y3", "--dim", "3", "--method", "fullgrid", "--k", "4"],
    ["--expr", "x1*x2 + sin(x3)", "--dim", "3", "--inputs", "N(0,1),U(-1,1),N(2,0.5)", "--method", "gudr", "--k", "3"],
]


def main() -> int:
    cli, schema_path = sys.argv[1], sys.argv[2]
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for args in RUNS:
        out = subprocess.run([cli, "estimate", *args], capture_output=True, text=True, check=True).stdout
        errors = list(validator.iter_errors(json.loads(out)))
        for e in errors:
            print(f"{' '.join(args)}: {e.message}")
        failures += bool(errors)
    print(f"{len(RUNS) - failures}/{len(RUNS)} reports valid")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
