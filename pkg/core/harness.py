from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, Mapping

import numpy as np
from dotenv import dotenv_values
from sympy import divisors

from .config import default_workers, log, master_seed
from .energy import shift_energy_sum
from .errors import AfcError, ConfigError, PreconditionError
from .field import Prime, get_prime
from .fpset import FpSet
from .setspec import SeedLike, format_rational, int_args, jsonable, parse_set_spec

CSV_COLUMNS = (
    "p",
    "alpha_realized",
    "beta_realized",
    "gamma",
    "family",
    "seed",
    "sizeA",
    "sizeB",
    "S",
    "normalized",
    "bound",
    "ratio",
)


class Theorem(str, Enum):
    THM3 = "thm3"
    THM4 = "thm4"


DEFAULT_EXPONENT = {Theorem.THM3: Fraction(1, 308), Theorem.THM4: Fraction(1, 2240)}
DEFAULT_CONSTANT = Fraction(15)
CONSTANT_NOTE = "thm4 constant C is unspecified; defaults to 15 for comparability with thm3"


def target_size(p: int, exponent: Fraction) -> int:
    return max(1, min(p, round(p ** float(exponent))))


def _rational(raw: Any, key: str) -> Fraction:
    try:
        return Fraction(str(raw).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key} must be a rational number, got '{raw}'") from exc


def _int_list(raw: Any, key: str) -> tuple[int, ...]:
    if isinstance(raw, (list, tuple)):
        return tuple(int(x) for x in raw)
    out: list[int] = []
    for token in str(raw).split(","):
        token = token.strip()
        if not token:
            continue
        lo, sep, hi = token.partition("..")
        try:
            if sep:
                out.extend(range(int(lo), int(hi)))
            else:
                out.append(int(token))
        except ValueError as exc:
            raise ConfigError(f"{key} has an invalid entry '{token}'") from exc
    if not out:
        raise ConfigError(f"{key} must not be empty")
    return tuple(out)


def _family_list(raw: Any) -> list[str]:
    if isinstance(raw, (list, tuple)):
        return [str(x).strip() for x in raw]
    return [part.strip() for part in str(raw).split(";") if part.strip()]


@dataclass(frozen=True)
class SweepConfig:
    primes: tuple[int, ...]
    alpha: Fraction
    beta: Fraction
    families: tuple[tuple[str, str], ...] = (("random", "random"),)
    seeds: tuple[int, ...] = (0,)
    exponent_c: Fraction | None = None
    constant_c: Fraction = DEFAULT_CONSTANT
    theorem: Theorem = Theorem.THM3
    workers: int = 1
    master_seed: int = 0

    def __post_init__(self) -> None:
        theorem = Theorem(self.theorem)
        object.__setattr__(self, "theorem", theorem)
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "constant_c", Fraction(self.constant_c))
        if self.exponent_c is None:
            object.__setattr__(self, "exponent_c", DEFAULT_EXPONENT[theorem])
        else:
            object.__setattr__(self, "exponent_c", Fraction(self.exponent_c))
        if not self.primes:
            raise ConfigError("primes must not be empty")
        if not self.families:
            raise ConfigError("at least one (family_a, family_b) pair is required")
        if not self.seeds:
            raise ConfigError("seeds must not be empty")
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not 0 < value <= 1:
                raise ConfigError(f"{name} must lie in (0, 1], got {value}")
        if self.exponent_c <= 0 or self.constant_c <= 0:
            raise ConfigError("exponent_c and constant_c must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for p in self.primes:
            try:
                get_prime(int(p))
            except AfcError as exc:
                raise ConfigError(f"invalid prime {p}: {exc.message}") from exc
            if theorem is Theorem.THM3:
                size_a, size_b = target_size(p, self.alpha), target_size(p, self.beta)
                if 4 * size_b < size_a:
                    raise ConfigError(
                        f"thm3 needs |B|/|A| >= 1/4; p={p} gives |A|={size_a}, |B|={size_b}"
                    )

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "SweepConfig":
        known = {
            "primes", "alpha", "beta", "family_a", "family_b", "seeds",
            "exponent_c", "constant_c", "theorem", "workers", "master_seed",
        }
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown sweep keys: {', '.join(unknown)}")
        for key in ("primes", "alpha", "beta"):
            if values.get(key) in (None, ""):
                raise ConfigError(f"missing required sweep key '{key}'")
        fams_a = _family_list(values.get("family_a") or "random")
        fams_b = _family_list(values.get("family_b") or "random")
        if len(fams_a) != len(fams_b) and 1 not in (len(fams_a), len(fams_b)):
            raise ConfigError("family_a and family_b must have equal length or one entry")
        count = max(len(fams_a), len(fams_b))
        families = tuple(
            (fams_a[i if len(fams_a) > 1 else 0], fams_b[i if len(fams_b) > 1 else 0]) for i in range(count)
        )
        theorem_raw = str(values.get("theorem") or "thm3").strip().lower()
        try:
            theorem = Theorem(theorem_raw)
        except ValueError as exc:
            raise ConfigError(f"theorem must be thm3 or thm4, got '{theorem_raw}'") from exc
        exponent = values.get("exponent_c")
        constant = values.get("constant_c")
        workers = values.get("workers")
        seed = values.get("master_seed")
        try:
            workers_n = int(workers) if workers not in (None, "") else default_workers()
            seed_n = int(seed) if seed not in (None, "") else master_seed()
        except ValueError as exc:
            raise ConfigError(f"workers and master_seed must be integers: {exc}") from exc
        return cls(
            primes=_int_list(values["primes"], "primes"),
            alpha=_rational(values["alpha"], "alpha"),
            beta=_rational(values["beta"], "beta"),
            families=families,
            seeds=_int_list(values.get("seeds") or "0", "seeds"),
            exponent_c=_rational(exponent, "exponent_c") if exponent not in (None, "") else None,
            constant_c=_rational(constant, "constant_c") if constant not in (None, "") else DEFAULT_CONSTANT,
            theorem=theorem,
            workers=workers_n,
            master_seed=seed_n,
        )

    def to_json(self) -> dict[str, Any]:
        return jsonable(asdict(self))


def load_config(path: str | None, overrides: Mapping[str, Any] | None = None) -> SweepConfig:
    values: dict[str, Any] = {}
    if path:
        if not os.path.isfile(path):
            raise FileNotFoundError(f"config file not found: {path}")
        values.update({k.lower(): v for k, v in dotenv_values(path).items() if v is not None})
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return SweepConfig.from_mapping(values)


def generate_set(p: Prime | int, spec: str, seed: SeedLike = None) -> FpSet:
    return parse_set_spec(p, spec, seed=seed)


def realize_family(prime: Prime, template: str, size: int, rng: np.random.Generator) -> FpSet:
    kind, _, args = template.strip().partition(":")
    kind = kind.lower()
    p = prime.p
    if kind == "random" and not args:
        return FpSet.from_elements(prime, rng.choice(p, size=size, replace=False))
    if kind == "interval" and not args:
        return FpSet.from_elements(prime, range(size))
    if kind == "ap" and args.count(",") <= 1:
        values = int_args(args, args.count(",") + 1, "ap") if args else []
        start, step = values + [0, 1][len(values) :]
        return FpSet.from_elements(prime, (start + step * np.arange(size, dtype=object)) % p)
    if kind == "gp" and "," not in args:
        (g,) = int_args(args, 1, "gp") if args else (prime.generator,)
        return FpSet.from_elements(prime, [pow(g, i, p) for i in range(size)])
    if kind == "subgroup" and not args:
        d = max(x for x in divisors(p - 1) if x <= size)
        return FpSet.from_elements(prime, prime.subgroup(d))
    return parse_set_spec(prime, template, seed=int(rng.integers(0, 2**63 - 1)))


@dataclass(frozen=True)
class ExperimentRecord:
    p: int
    alpha_realized: float | None
    beta_realized: float | None
    gamma: float | None
    family: str
    seed: int
    sizeA: int
    sizeB: int
    S: int | None
    normalized: Fraction | None
    bound: float | None
    ratio: float | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_row(self) -> list[str]:
        row = []
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            if value is None:
                row.append("")
            elif isinstance(value, Fraction):
                row.append(format_rational(value))
            elif isinstance(value, float):
                row.append(format_real(value))
            else:
                row.append(str(value))
        return row

    def to_json(self) -> dict[str, Any]:
        payload = {name: getattr(self, name) for name in CSV_COLUMNS}
        for name in ("alpha_realized", "beta_realized", "gamma", "bound", "ratio"):
            if payload[name] is not None:
                payload[name] = round_real(payload[name])
        if self.error is not None:
            payload["error"] = self.error
        return jsonable(payload)

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> "ExperimentRecord":
        def real(key: str) -> float | None:
            value = payload.get(key)
            return None if value in (None, "") else float(value)

        def exact(key: str) -> int | None:
            value = payload.get(key)
            return None if value in (None, "") else int(value)

        normalized = payload.get("normalized")
        return cls(
            p=int(payload["p"]),
            alpha_realized=real("alpha_realized"),
            beta_realized=real("beta_realized"),
            gamma=real("gamma"),
            family=str(payload["family"]),
            seed=int(payload["seed"]),
            sizeA=int(payload["sizeA"]),
            sizeB=int(payload["sizeB"]),
            S=exact("S"),
            normalized=None if normalized in (None, "") else Fraction(str(normalized)),
            bound=real("bound"),
            ratio=real("ratio"),
            error=payload.get("error") or None,
        )


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual: float
    n_points: int
    per_prime: dict[int, float] = field(default_factory=dict, hash=False)

    def to_json(self) -> dict[str, Any]:
        return jsonable(asdict(self))


def format_real(value: float) -> str:
    return f"{value:.12g}"


def round_real(value: float) -> float:
    return float(format_real(value))


def _cell_seed(cfg: SweepConfig, p: int, family_idx: int, seed_idx: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([cfg.master_seed, p, family_idx, seed_idx, cfg.seeds[seed_idx]])


def _run_cell(job: tuple[SweepConfig, int, int, int]) -> ExperimentRecord:
    cfg, p, family_idx, seed_idx = job
    fam_a, fam_b = cfg.families[family_idx]
    family = f"{fam_a}|{fam_b}"
    seed = cfg.seeds[seed_idx]
    size_a, size_b = target_size(p, cfg.alpha), target_size(p, cfg.beta)
    try:
        prime = get_prime(p)
        seq_a, seq_b = _cell_seed(cfg, p, family_idx, seed_idx).spawn(2)
        A = realize_family(prime, fam_a, size_a, np.random.default_rng(seq_a))
        B = realize_family(prime, fam_b, size_b, np.random.default_rng(seq_b)).star()
        if A.card == 0 or B.card == 0:
            raise PreconditionError(f"empty set after generation (|A|={A.card}, |B|={B.card})")
        result = shift_energy_sum(A, B)
    except AfcError as exc:
        return ExperimentRecord(p, None, None, None, family, seed, size_a, size_b, None, None, None, None, exc.line())
    # reals are stored at output precision so emitted records parse back unchanged
    log_p = math.log(p)
    alpha = round_real(math.log(A.card) / log_p)
    beta = round_real(math.log(B.card) / log_p)
    gamma = round_real(min(beta, 1.0 - alpha))
    bound = float(cfg.constant_c) * p ** (-gamma * float(cfg.exponent_c))
    return ExperimentRecord(
        p, alpha, beta, gamma, family, seed, A.card, B.card,
        result.total, result.normalized, round_real(bound), round_real(float(result.normalized) / bound),
    )


def run_sweep(cfg: SweepConfig) -> list[ExperimentRecord]:
    jobs = [
        (cfg, int(p), family_idx, seed_idx)
        for p in cfg.primes
        for family_idx in range(len(cfg.families))
        for seed_idx in range(len(cfg.seeds))
    ]
    log("sweep", f"{len(jobs)} cells, workers={cfg.workers}, theorem={cfg.theorem.value}")
    if cfg.workers == 1 or len(jobs) <= 1:
        records = [_run_cell(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            records = list(executor.map(_run_cell, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    failed = sum(1 for r in records if not r.ok)
    if failed:
        log("sweep", f"{failed} cell(s) failed")
    return records


def fit_exponent(records: Iterable[ExperimentRecord]) -> FitResult:
    by_prime: dict[int, list[float]] = {}
    for record in records:
        if record.ok and record.normalized is not None and record.normalized > 0:
            by_prime.setdefault(record.p, []).append(float(record.normalized))
    if len(by_prime) < 2:
        raise PreconditionError(f"fit needs positive measurements at >= 2 distinct primes, got {len(by_prime)}")
    primes = sorted(by_prime)
    medians = [float(np.median(by_prime[p])) for p in primes]
    x = np.log(np.asarray(primes, dtype=float))
    y = np.log(np.asarray(medians, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return FitResult(float(slope), float(intercept), residual, len(primes), dict(zip(primes, medians)))


def emit_records(records: Iterable[ExperimentRecord], fmt: str = "csv") -> str:
    fmt = fmt.lower()
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(record.to_row() for record in records)
        return buffer.getvalue()
    if fmt == "jsonl":
        return "".join(
            json.dumps(record.to_json(), ensure_ascii=True, separators=(",", ":")) + "\n" for record in records
        )
    raise ConfigError(f"format must be csv or jsonl, got '{fmt}'")


def read_records(text: str, fmt: str | None = None) -> list[ExperimentRecord]:
    stripped = text.lstrip()
    if fmt is None:
        fmt = "jsonl" if stripped.startswith("{") or not stripped else "csv"
    if fmt == "jsonl":
        try:
            return [ExperimentRecord.from_json(json.loads(line)) for line in text.splitlines() if line.strip()]
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"invalid jsonl record: {exc}") from exc
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ConfigError("csv header does not match the record schema")
        out = []
        for row in reader:
            rec = ExperimentRecord.from_json(row)
            if rec.S is None:
                rec = replace(rec, error="failed cell")
            out.append(rec)
        return out
    raise ConfigError(f"format must be csv or jsonl, got '{fmt}'")


def write_records(records: list[ExperimentRecord], path: str, fmt: str, cfg: SweepConfig) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(emit_records(records, fmt))
    meta = {
        "config": cfg.to_json(),
        "format": fmt,
        "columns": list(CSV_COLUMNS),
        "bound": "constant_c * p^(-gamma * exponent_c), gamma = min(beta, 1 - alpha) from realized sizes",
        "records": len(records),
        "failed": [
            {"p": r.p, "family": r.family, "seed": r.seed, "error": r.error} for r in records if not r.ok
        ],
    }
    if cfg.theorem is Theorem.THM4:
        meta["constant_c_note"] = CONSTANT_NOTE
    with open(path + ".meta.json", "w", encoding="utf-8") as handle:
        json.dump(meta, handle, ensure_ascii=False, indent=2)
