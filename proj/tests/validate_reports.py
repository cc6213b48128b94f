"""Validate CLI JSON reports against the report schema; also check row widths."""
import json
import sys

import jsonschema


def main(argv):
    with open(argv[1]) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    for path in argv[2:]:
        with open(path) as f:
            report = json.load(f)
        errors = list(validator.iter_errors(report))
        for name, table in report.get("tables", {}).items():
            width = len(table["columns"])
            for i, row in enumerate(table["rows"]):
                if len(row) != width:
                    errors.append(f"table {name} row {i}: {len(row)} cells, {width} columns")
        gated_fail = any(v["gated"] and not v["passed"] for v in report["verdicts"])
        if gated_fail != (report["status"] == "fail"):
            errors.append("status does not match the gated verdicts")
        for e in errors:
            print(f"{path}: {getattr(e, 'message', e)}")
        bad += bool(errors)
        if not errors:
            print(f"{path}: ok")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
