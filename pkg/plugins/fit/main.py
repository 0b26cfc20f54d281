from __future__ import annotations

from pathlib import Path

from core.harness import fit_exponent, read_records
from core.setspec import dumps


class Plugin:
    def __init__(self) -> None:
        self._api = None

    def on_load(self, api) -> None:
        self._api = api
        api.register_command("fit", self.configure, self.handle, help="Fit the decay exponent of normalized S in p")

    def configure(self, parser) -> None:
        parser.add_argument("--in", dest="path", required=True, help="records written by `sweep`")
        parser.add_argument("--format", choices=("csv", "jsonl"), help="input format (sniffed by default)")

    def handle(self, args, out) -> int:
        records = read_records(Path(args.path).read_text(encoding="utf-8"), args.format)
        result = fit_exponent(records)
        self._api.logger(f"[fit] {result.n_points} primes, slope={result.slope:.6g}")
        out.write(dumps(result.to_json()) + "\n")
        return 0
