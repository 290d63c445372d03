"""Collects one outcome line per acceptance criterion for the terminal summary."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(k: int, ok: bool, msg: str) -> None:
    RESULTS[k] = (ok, msg)
    print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {msg}")
