from __future__ import annotations

from core.energy import EnergyMethod, additive_energy, multiplicative_energy, shift_energy_sum
from core.field import get_prime
from core.setspec import dumps, parse_set_spec


class Plugin:
    def __init__(self) -> None:
        self._api = None

    def on_load(self, api) -> None:
        self._api = api
        api.register_command("energy", self.configure, self.handle, help="Additive and multiplicative energies")

    def configure(self, parser) -> None:
        parser.add_argument("--p", type=int, required=True, help="prime modulus")
        parser.add_argument("--a", required=True, help="set spec for A")
        parser.add_argument("--b", required=True, help="set spec for B")
        parser.add_argument("--shift-sum", action="store_true", help="also compute S = sum_b E+(A, bA)")
        parser.add_argument("--method", choices=[m.value for m in EnergyMethod], default=EnergyMethod.CONVOLUTION.value)

    def handle(self, args, out) -> int:
        prime = get_prime(args.p)
        A = parse_set_spec(prime, args.a)
        B = parse_set_spec(prime, args.b)
        payload = {
            "p": prime.p,
            "EA_add": additive_energy(A, B, method=args.method).value,
            "E_mul": multiplicative_energy(A, B, method=args.method).value,
            "S": None,
            "normalized": None,
        }
        if args.shift_sum:
            shifted = shift_energy_sum(A, B, method=args.method)
            payload["S"] = shifted.total
            payload["normalized"] = shifted.normalized
        out.write(dumps(payload) + "\n")
        return 0
