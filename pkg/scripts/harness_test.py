import json
import math
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np

ROOT_DIR = Path(__file__).resolve().parents[1]
if str(ROOT_DIR) not in sys.path:
    sys.path.insert(0, str(ROOT_DIR))

from core.errors import ConfigError, PreconditionError, SetSpecError
from core.harness import (
    CSV_COLUMNS,
    ExperimentRecord,
    SweepConfig,
    Theorem,
    emit_records,
    fit_exponent,
    generate_set,
    load_config,
    read_records,
    run_sweep,
    write_records,
)


def synthetic(p: int, normalized: Fraction) -> ExperimentRecord:
    return ExperimentRecord(p, 0.5, 0.5, 0.5, "random|random", 0, 1, 1, 1, normalized, 1.0, float(normalized))


def main() -> int:
    if generate_set(101, "0..10").to_list() != list(range(10)):
        print("FAIL (generate interval)")
        return 1
    if generate_set(13, "subgroup:4").to_list() != [1, 5, 8, 12]:
        print("FAIL (generate subgroup)")
        return 1
    first = generate_set(1009, "random:20,seed=7")
    if first.card != 20 or first != generate_set(1009, "random:20,seed=7"):
        print("FAIL (generate random determinism)")
        return 1
    try:
        generate_set(13, "subgroup:5")
        print("FAIL (generate subgroup order)")
        return 1
    except SetSpecError:
        pass

    cfg = SweepConfig(primes=(5,), alpha=Fraction(1, 2), beta=Fraction(1, 2), families=(("0,1", "1,2"),))
    (record,) = run_sweep(cfg)
    if record.S != 10 or record.normalized != Fraction(5, 8) or (record.sizeA, record.sizeB) != (2, 2):
        print(f"FAIL (single cell): {record}")
        return 1
    if abs(record.gamma - min(record.beta_realized, 1 - record.alpha_realized)) > 1e-11:
        print("FAIL (gamma)")
        return 1
    expected_bound = 15 * 5 ** (-record.gamma / 308)
    if abs(record.bound - expected_bound) > 1e-9 or abs(record.ratio - 0.625 / expected_bound) > 1e-9:
        print(f"FAIL (bound/ratio): {record}")
        return 1

    cfg = SweepConfig(primes=(101,), alpha=1, beta=1, families=(("interval", "interval"),))
    (record,) = run_sweep(cfg)
    if record.normalized != 1 or record.sizeB != 100:
        print(f"FAIL (trivial ceiling cell): {record}")
        return 1

    cfg = SweepConfig(primes=(101, 257, 1009), alpha=Fraction(1, 2), beta=Fraction(1, 2), seeds=tuple(range(10)))
    records = run_sweep(cfg)
    if len(records) != 30 or not all(r.ok and r.normalized <= 1 for r in records):
        print("FAIL (sweep completeness / ceiling)")
        return 1
    if emit_records(run_sweep(cfg)) != emit_records(records):
        print("FAIL (determinism)")
        return 1
    parallel = SweepConfig(
        primes=(101, 257, 1009), alpha=Fraction(1, 2), beta=Fraction(1, 2), seeds=tuple(range(10)), workers=3
    )
    if emit_records(run_sweep(parallel)) != emit_records(records):
        print("FAIL (determinism across workers)")
        return 1

    templates = (("ap:1,3", "gp"), ("subgroup", "random"), ("gp:3", "ap"))
    cfg = SweepConfig(primes=(1009,), alpha=Fraction(1, 2), beta=Fraction(1, 2), families=templates, seeds=(0, 1))
    for record in run_sweep(cfg):
        if not record.ok or record.normalized > 1:
            print(f"FAIL (family templates): {record}")
            return 1

    n, p = 32, 1009
    alpha = Fraction(math.log(n) / math.log(p))
    cfg = SweepConfig(primes=(p,), alpha=alpha, beta=alpha, seeds=tuple(range(200)))
    records = run_sweep(cfg)
    if any(r.sizeA != n for r in records):
        print("FAIL (random expectation sizes)")
        return 1
    median = float(np.median([float(r.normalized) for r in records]))
    expected = 1 / n + n / p
    if not 0.5 * expected <= median <= 2.0 * expected:
        print(f"FAIL (random expectation): median={median} expected~{expected}")
        return 1

    cfg = SweepConfig(primes=(1009, 4093, 16381), alpha=Fraction(1, 2), beta=Fraction(1, 2), seeds=tuple(range(20)))
    fit = fit_exponent(run_sweep(cfg))
    if fit.n_points != 3 or abs(fit.slope + 0.5) > 0.1:
        print(f"FAIL (decay slope): {fit}")
        return 1

    primes = (101, 1009, 10007, 100003)
    fit = fit_exponent([synthetic(q, Fraction(q ** -0.1)) for q in primes])
    if abs(fit.slope + 0.1) > 1e-9:
        print(f"FAIL (synthetic power law): {fit}")
        return 1
    fit = fit_exponent([synthetic(q, Fraction(1, 3)) for q in primes for _ in range(3)])
    if abs(fit.slope) > 1e-9 or fit.n_points != 4:
        print(f"FAIL (constant fit): {fit}")
        return 1
    try:
        fit_exponent([synthetic(101, Fraction(1, 2)), synthetic(101, Fraction(1, 3))])
        print("FAIL (fit needs two primes)")
        return 1
    except PreconditionError:
        pass

    if emit_records([]) != ",".join(CSV_COLUMNS) + "\n":
        print("FAIL (empty csv)")
        return 1
    cfg = SweepConfig(primes=(5,), alpha=Fraction(1, 2), beta=Fraction(1, 2), families=(("0,1", "1,2"),))
    lines = emit_records(run_sweep(cfg)).splitlines()
    if len(lines) != 2 or len(lines[1].split(",")) != 12 or lines[1].split(",")[9] != "5/8":
        print(f"FAIL (one csv record): {lines}")
        return 1

    cfg = SweepConfig(
        primes=(13, 101), alpha=Fraction(1, 2), beta=Fraction(1, 2), families=(("subgroup:7", "random"), ("random", "random")), seeds=(0, 1)
    )
    records = run_sweep(cfg)
    failed = [r for r in records if not r.ok]
    if len(failed) != 4 or not failed[0].error.startswith("error: setspec:"):
        print(f"FAIL (failed cells in-band): {[r.error for r in records]}")
        return 1
    for fmt in ("jsonl", "csv"):
        text = emit_records(records, fmt)
        if emit_records(read_records(text, fmt), fmt) != text or emit_records(read_records(text), fmt) != text:
            print(f"FAIL (round trip {fmt})")
            return 1
    if read_records(emit_records(records, "jsonl")) != records:
        print("FAIL (jsonl records identical after parse)")
        return 1
    succeeded = [r for r in records if r.ok]
    if read_records(emit_records(succeeded, "csv")) != succeeded:
        print("FAIL (csv records identical after parse)")
        return 1

    cfg = SweepConfig(
        primes=(101,), alpha=Fraction(1, 2), beta=Fraction(1, 2), families=(("ap:x", "random"), ("gp:abc", "random"), ("random", "random"))
    )
    records = run_sweep(cfg)
    if [r.ok for r in records] != [False, False, True] or not all(r.error.startswith("error: setspec:") for r in records[:2]):
        print(f"FAIL (bad family template in-band): {[r.error for r in records]}")
        return 1

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "sweep.env"
        path.write_text("PRIMES=101,257\nALPHA=1/2\nBETA=0.5\nSEEDS=0..3\nTHEOREM=thm4\nFAMILY_A=random;interval\n", encoding="utf-8")
        cfg = load_config(str(path), {"seeds": "5,6"})
        checks = [
            ("primes", cfg.primes == (101, 257)),
            ("seeds override", cfg.seeds == (5, 6)),
            ("thm4 exponent", cfg.theorem is Theorem.THM4 and cfg.exponent_c == Fraction(1, 2240)),
            ("families broadcast", cfg.families == (("random", "random"), ("interval", "random"))),
            ("constant", cfg.constant_c == 15),
        ]
        for label, ok in checks:
            if not ok:
                print(f"FAIL (config {label}): {cfg}")
                return 1
        out = Path(tmp) / "out" / "records.csv"
        records = run_sweep(cfg)
        write_records(records, str(out), "csv", cfg)
        meta = json.loads(Path(str(out) + ".meta.json").read_text(encoding="utf-8"))
        if meta["records"] != 8 or meta["failed"] or "constant_c_note" not in meta:
            print(f"FAIL (meta sidecar): {meta}")
            return 1
        if len(read_records(out.read_text(encoding="utf-8"))) != 8:
            print("FAIL (read written csv)")
            return 1

    for label, values in (
        ("thm3 ratio", {"primes": "1009", "alpha": "1", "beta": "1/10"}),
        ("alpha range", {"primes": "101", "alpha": "3/2", "beta": "1/2"}),
        ("non-prime", {"primes": "100", "alpha": "1/2", "beta": "1/2"}),
        ("missing beta", {"primes": "101", "alpha": "1/2"}),
        ("unknown key", {"primes": "101", "alpha": "1/2", "beta": "1/2", "colour": "red"}),
        ("bad theorem", {"primes": "101", "alpha": "1/2", "beta": "1/2", "theorem": "thm9"}),
    ):
        try:
            load_config(None, values)
        except ConfigError:
            continue
        print(f"FAIL (config error expected): {label}")
        return 1

    print("PASS")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
