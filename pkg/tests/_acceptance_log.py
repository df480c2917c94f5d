"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

from __future__ import annotations

import time
from contextlib import contextmanager

LINES: list[str] = []


@contextmanager
def criterion(number: int, title: str, limit_s: float):
    """Time the block, record PASS or FAIL, and fail if it ran over ``limit_s``."""
    start = time.perf_counter()
    detail = {"note": ""}
    try:
        yield detail
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        line = f"criterion {number:>2} FAIL  {title} ({elapsed:.1f}s) {type(exc).__name__}: {exc}".rstrip()
        LINES.append(line)
        print(line)
        raise
    elapsed = time.perf_counter() - start
    if elapsed >= limit_s:
        line = f"criterion {number:>2} FAIL  {title} ({elapsed:.1f}s, limit {limit_s:.0f}s)"
        LINES.append(line)
        print(line)
        raise AssertionError(f"took {elapsed:.1f}s, limit {limit_s}s")
    note = f" {detail['note']}" if detail["note"] else ""
    line = f"criterion {number:>2} PASS  {title} ({elapsed:.1f}s){note}"
    LINES.append(line)
    print(line)
