from __future__ import annotations

from core.field import get_prime
from core.lemmas import verify_cover
from core.setspec import dumps, parse_set_spec


class Plugin:
    def __init__(self) -> None:
        self._api = None

    def on_load(self, api) -> None:
        self._api = api
        api.register_command("cover", self.configure, self.handle, help="Greedy covering of X1 by translates of X2")

    def configure(self, parser) -> None:
        parser.add_argument("--p", type=int, required=True, help="prime modulus")
        parser.add_argument("--x1", required=True, help="set to cover")
        parser.add_argument("--x2", required=True, help="set whose translates cover")
        parser.add_argument("--eps", default="1/100", help="uncovered fraction, rational in (0, 1)")

    def handle(self, args, out) -> int:
        prime = get_prime(args.p)
        result, report = verify_cover(parse_set_spec(prime, args.x1), parse_set_spec(prime, args.x2), args.eps)
        payload = result.to_json()
        payload["holds"] = report.holds
        out.write(dumps(payload) + "\n")
        return 0
