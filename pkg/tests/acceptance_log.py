"""Collects one verdict line per acceptance criterion for the terminal summary."""

from __future__ import annotations

from contextlib import contextmanager

LINES: list[str] = []


@contextmanager
def criterion(number: int, title: str):
    """Record PASS or FAIL for a criterion; failures still propagate to pytest."""
    details: list[str] = []
    try:
        yield details
    except BaseException as exc:
        note = "; ".join(details + [f"{type(exc).__name__}: {exc}".splitlines()[0]])
        _emit(f"FAIL  criterion {number}: {title} ({note})")
        raise
    _emit(f"PASS  criterion {number}: {title}" + (f" ({'; '.join(details)})" if details else ""))


def _emit(line: str) -> None:
    LINES.append(line)
    print(line)
