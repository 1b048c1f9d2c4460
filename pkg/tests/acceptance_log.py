"""Collects one pass/fail line per acceptance criterion for the final report."""

from __future__ import annotations

from contextlib import contextmanager

LINES: list[str] = []


def record(line: str) -> None:
    LINES.append(line)
    print(line)


@contextmanager
def criterion(number: int, total: int, name: str):
    """Record a PASS line if the block completes, a FAIL line if it raises."""
    try:
        yield
    except BaseException:
        record(f"[{number}/{total}] {name}: FAIL")
        raise
    record(f"[{number}/{total}] {name}: PASS")
