from __future__ import annotations

from core.errors import ContractError
from core.field import get_prime
from core.fpset import diffset, dilate, prodset, quotient_set, sumset, translate
from core.setspec import dumps, parse_set_spec, set_to_json

OPERATIONS = ("sum", "diff", "prod", "quotient", "dilate", "translate")


class Plugin:
    def __init__(self) -> None:
        self._api = None

    def on_load(self, api) -> None:
        self._api = api
        api.register_command("sumset", self.configure, self.handle, help="Set algebra over Z_p")

    def configure(self, parser) -> None:
        parser.add_argument("--p", type=int, required=True, help="prime modulus")
        parser.add_argument("--x", required=True, help="left set spec")
        parser.add_argument("--y", help="right set spec (sum/diff/prod/quotient)")
        parser.add_argument("--op", choices=OPERATIONS, default="sum")
        parser.add_argument("--b", type=int, help="dilation factor or translation for dilate/translate")

    def handle(self, args, out) -> int:
        prime = get_prime(args.p)
        X = parse_set_spec(prime, args.x)
        if args.op in ("dilate", "translate"):
            if args.b is None:
                raise ContractError(f"--op {args.op} needs --b")
            result = dilate(args.b, X) if args.op == "dilate" else translate(args.b, X)
        else:
            if args.y is None:
                raise ContractError(f"--op {args.op} needs --y")
            Y = parse_set_spec(prime, args.y)
            op = {"sum": sumset, "diff": diffset, "prod": prodset, "quotient": quotient_set}[args.op]
            result = op(X, Y)
        self._api.logger(f"[sumset] {args.op} p={prime.p} -> {result.card} elements")
        out.write(dumps(set_to_json(result)) + "\n")
        return 0
