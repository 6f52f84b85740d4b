"""Collects one pass/fail line per acceptance criterion."""
RESULTS = {}


def record(number: int, title: str, passed: bool, detail: str = "") -> bool:
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    RESULTS[number] = line
    print(line)
    return passed
