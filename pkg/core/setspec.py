from __future__ import annotations

import json
import re
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from .errors import SetSpecError
from .field import Prime, get_prime
from .fpset import FpSet

RANGE_RE = re.compile(r"^(-?\d+)\.\.(-?\d+)$")
INT_RE = re.compile(r"^-?\d+$")

SeedLike = int | np.random.SeedSequence | None


def int_args(raw: str, count: int, label: str) -> list[int]:
    parts = [part.strip() for part in raw.split(",")]
    if len(parts) != count or not all(INT_RE.match(part) for part in parts):
        raise SetSpecError(f"'{label}' expects {count} integer argument(s), got '{raw}'")
    return [int(part) for part in parts]


def _random(prime: Prime, args: str, seed: SeedLike) -> FpSet:
    parts = [part.strip() for part in args.split(",") if part.strip()]
    if not parts or len(parts) > 2 or not INT_RE.match(parts[0]):
        raise SetSpecError(f"'random' expects size[,seed], got '{args}'")
    size = int(parts[0])
    if len(parts) == 2:
        raw_seed = parts[1].removeprefix("seed=").strip()
        if not INT_RE.match(raw_seed):
            raise SetSpecError(f"invalid random seed '{parts[1]}'")
        seed = int(raw_seed)
    if size < 0 or size > prime.p:
        raise SetSpecError(f"random size {size} outside [0, {prime.p}]")
    rng = np.random.default_rng(0 if seed is None else seed)
    return FpSet.from_elements(prime, rng.choice(prime.p, size=size, replace=False))


def _progression(prime: Prime, kind: str, args: str) -> FpSet:
    if kind == "ap":
        start, step, length = int_args(args, 3, "ap")
        if length < 0:
            raise SetSpecError("ap length must be >= 0")
        return FpSet.from_elements(prime, (start + step * np.arange(length, dtype=object)) % prime.p)
    g, length = int_args(args, 2, "gp")
    if length < 0:
        raise SetSpecError("gp length must be >= 0")
    values = []
    acc = 1
    for _ in range(length):
        values.append(acc)
        acc = acc * g % prime.p
    return FpSet.from_elements(prime, values)


def parse_set_spec(modulus: Prime | int, spec: str, *, seed: SeedLike = None) -> FpSet:
    prime = modulus if isinstance(modulus, Prime) else get_prime(int(modulus))
    text = spec.strip()
    if text in ("", "{}", "empty"):
        return FpSet.empty(prime)
    kind, sep, args = text.partition(":")
    kind = kind.strip().lower()
    if sep:
        if kind in ("ap", "gp"):
            return _progression(prime, kind, args)
        if kind == "subgroup":
            (d,) = int_args(args, 1, "subgroup")
            if d <= 0 or (prime.p - 1) % d != 0:
                raise SetSpecError(f"subgroup order {d} does not divide p-1={prime.p - 1}")
            return FpSet.from_elements(prime, prime.subgroup(d))
        if kind == "random":
            return _random(prime, args, seed)
        raise SetSpecError(f"unknown set generator '{kind}'")

    values: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        match = RANGE_RE.match(token)
        if match:
            lo, hi = int(match.group(1)), int(match.group(2))
            if hi - lo > prime.p:
                raise SetSpecError(f"range {token} is longer than p={prime.p}")
            values.extend(range(lo, hi))
            continue
        if not INT_RE.match(token):
            raise SetSpecError(f"invalid set element '{token}'")
        values.append(int(token))
    return FpSet.from_elements(prime, values)


def set_to_json(X: FpSet) -> dict[str, Any]:
    return {"p": X.p, "elements": X.to_list()}


def set_from_json(payload: dict[str, Any] | str) -> FpSet:
    if isinstance(payload, str):
        try:
            payload = json.loads(payload)
        except json.JSONDecodeError as exc:
            raise SetSpecError(f"invalid set JSON: {exc}") from exc
    if not isinstance(payload, dict) or "p" not in payload or "elements" not in payload:
        raise SetSpecError("set JSON needs 'p' and 'elements'")
    elements = payload["elements"]
    if not isinstance(elements, list):
        raise SetSpecError("'elements' must be a list")
    p = int(payload["p"])
    if any(not isinstance(x, int) or not 0 <= x < p for x in elements):
        raise SetSpecError(f"set elements must be integers in [0, {p})")
    return FpSet.from_elements(get_prime(p), elements)


def dumps(payload: Any) -> str:
    return json.dumps(jsonable(payload), ensure_ascii=True, separators=(",", ":"))


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, FpSet):
        return set_to_json(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "to_json"):
        return value.to_json()
    raise TypeError(f"cannot serialize {type(value).__name__}")
