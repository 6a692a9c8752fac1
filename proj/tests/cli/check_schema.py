"""Validates scenario files against docs/scenario.schema.json.

Usage: check_schema.py SCHEMA [--expect-invalid] FILE...
"""

import json
import sys

import jsonschema


def main(argv):
    schema_path, rest = argv[1], argv[2:]
    expect_valid = True
    if rest and rest[0] == "--expect-invalid":
        expect_valid, rest = False, rest[1:]
    with open(schema_path, encoding="utf-8") as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for path in rest:
        with open(path, encoding="utf-8") as f:
            errors = list(validator.iter_errors(json.load(f)))
        ok = not errors if expect_valid else bool(errors)
        print(f"{'ok  ' if ok else 'FAIL'} {path}")
        if not ok:
            failures += 1
            for e in errors:
                print(f"     {e.json_path}: {e.message}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
