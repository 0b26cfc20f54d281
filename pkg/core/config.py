from __future__ import annotations

import os
import sys

DEFAULT_MAX_P = 1 << 24
DEFAULT_WORKERS = 1
DEFAULT_MASTER_SEED = 0


def _parse_int_env(name: str, default: int, *, minimum: int | None = None) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        print(f"ENV WARN: {name} must be an integer. Using default={default}.", file=sys.stderr)
        return default
    if minimum is not None and value < minimum:
        print(f"ENV WARN: {name} must be >= {minimum}. Using default={default}.", file=sys.stderr)
        return default
    return value


def max_modulus() -> int:
    return _parse_int_env("AFC_MAX_P", DEFAULT_MAX_P, minimum=2)


def default_workers() -> int:
    return _parse_int_env("AFC_WORKERS", DEFAULT_WORKERS, minimum=1)


def master_seed() -> int:
    return _parse_int_env("AFC_MASTER_SEED", DEFAULT_MASTER_SEED, minimum=0)


def verbose_enabled() -> bool:
    return os.getenv("AFC_VERBOSE", "0").strip() == "1"


def log(tag: str, message: str) -> None:
    if verbose_enabled():
        print(f"[{tag}] {message}", file=sys.stderr)
