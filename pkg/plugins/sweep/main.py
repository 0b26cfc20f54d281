from __future__ import annotations

from core.harness import emit_records, load_config, run_sweep, write_records
from core.setspec import dumps

# flag -> config key
FLAG_KEYS = {
    "primes": "primes",
    "alpha": "alpha",
    "beta": "beta",
    "family_a": "family_a",
    "family_b": "family_b",
    "seeds": "seeds",
    "exponent_c": "exponent_c",
    "constant_c": "constant_c",
    "theorem": "theorem",
    "workers": "workers",
    "master_seed": "master_seed",
}


class Plugin:
    def __init__(self) -> None:
        self._api = None

    def on_load(self, api) -> None:
        self._api = api
        api.register_command("sweep", self.configure, self.handle, help="Measure sum_b E+(A, bA) over a parameter grid")

    def configure(self, parser) -> None:
        parser.add_argument("--config", help="key=value sweep file (flags override it)")
        parser.add_argument("--primes", help="comma list of primes")
        parser.add_argument("--alpha", help="|A| = round(p^alpha), rational")
        parser.add_argument("--beta", help="|B| = round(p^beta), rational")
        parser.add_argument("--family-a", help="family templates for A, ';'-separated")
        parser.add_argument("--family-b", help="family templates for B, ';'-separated")
        parser.add_argument("--seeds", help="seed list, e.g. 0..20 or 1,2,3")
        parser.add_argument("--exponent-c", help="decay exponent (thm3: 1/308, thm4: 1/2240)")
        parser.add_argument("--constant-c", help="bound constant (default 15)")
        parser.add_argument("--theorem", choices=("thm3", "thm4"))
        parser.add_argument("--workers", help="worker processes (AFC_WORKERS)")
        parser.add_argument("--master-seed", help="master seed (AFC_MASTER_SEED)")
        parser.add_argument("--out", help="output file; a .meta.json sidecar is written next to it")
        parser.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    def handle(self, args, out) -> int:
        overrides = {key: getattr(args, attr) for attr, key in FLAG_KEYS.items()}
        cfg = load_config(args.config, overrides)
        records = run_sweep(cfg)
        failed = sum(1 for record in records if not record.ok)
        self._api.logger(f"[sweep] {len(records)} records, {failed} failed")
        if args.out:
            write_records(records, args.out, args.format, cfg)
            out.write(dumps({"out": args.out, "records": len(records), "failed": failed}) + "\n")
        else:
            out.write(emit_records(records, args.format))
        return 0
