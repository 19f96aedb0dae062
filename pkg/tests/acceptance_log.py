"""Collects one verdict per acceptance criterion for the end-of-run summary."""
RESULTS = {}


def report(number, title, ok, detail=""):
    RESULTS[number] = (title, bool(ok), detail)
    line = format_line(number)
    print(line)
    return ok


def format_line(number):
    title, ok, detail = RESULTS[number]
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")


def lines():
    return [format_line(k) for k in sorted(RESULTS)]
