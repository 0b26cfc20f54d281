from __future__ import annotations

from core.energy import shift_energy_sum
from core.field import get_prime
from core.fpset import FpSet
from core.graph import PairGraph
from core.lemmas import (
    BsgWitness,
    best_dilate,
    dilate_sumset_ceiling,
    garaev_ratio,
    popular_sum_graph,
    select_high_energy_shifts,
    verify_bsg_witness,
    verify_cover,
    verify_quotient,
    verify_ruzsa_sums,
    verify_ruzsa_triangle,
)
from core.setspec import dumps, parse_set_spec

INT_FLAGS = {"--q", "--tau"}

# target -> (help, [(flag, required, help)])
TARGETS: dict[str, tuple[str, list[tuple[str, bool, str]]]] = {
    "ruzsa3": ("|X-Z| <= |X-Y||Y-Z|/|Y|", [("--x", True, "X"), ("--y", True, "Y"), ("--z", True, "Z")]),
    "ruzsaK": ("|X1+...+Xk| <= prod|Y+Xi|/|Y|^(k-1)", [("--y", True, "Y")]),
    "dilate": ("best dilate xi in G for |X + xi Y|", [("--x", True, "X"), ("--y", True, "Y"), ("--g", True, "G in Z_p*")]),
    "cover": ("greedy translate cover", [("--x1", True, "X1"), ("--x2", True, "X2"), ("--eps", True, "rational in (0, 1)")]),
    "quotient": ("sumset criterion vs quotient-set membership", [("--x", True, "X"), ("--y", True, "Y")]),
    "bsg": (
        "check a BSG witness (A', B', Q)",
        [
            ("--a", True, "A"),
            ("--b", True, "B"),
            ("--k", True, "K"),
            ("--a-prime", True, "A'"),
            ("--b-prime", True, "B'"),
            ("--q", True, "Q"),
        ],
    ),
    "garaev": ("sum-product ratio with L = min(|B|, p/|A|)", [("--a", True, "A"), ("--b", True, "B")]),
    "popular": ("popular-sum graph for E+(A,B) > (|A||B|)^(3/2)/K", [("--a", True, "A"), ("--b", True, "B"), ("--k", True, "K")]),
    "shifts": ("shifts b with E+(A, bA) > tau", [("--a", True, "A"), ("--b", True, "B"), ("--tau", True, "threshold")]),
    "ceiling": ("K = max_b |A + bA| and the energy floor", [("--a", True, "A'"), ("--b", True, "B'")]),
}


class Plugin:
    def __init__(self) -> None:
        self._api = None

    def on_load(self, api) -> None:
        self._api = api
        api.register_command("verify", self.configure, self.handle, help="Check a toolkit inequality and print its report")

    def configure(self, parser) -> None:
        targets = parser.add_subparsers(dest="target", required=True, metavar="<target>")
        for name, (text, flags) in TARGETS.items():
            sub = targets.add_parser(name, help=text, description=text)
            sub.add_argument("--p", type=int, required=True, help="prime modulus")
            for flag, required, flag_help in flags:
                sub.add_argument(flag, required=required, help=flag_help, type=int if flag in INT_FLAGS else str)
            if name == "ruzsaK":
                sub.add_argument("--x", action="append", required=True, help="summand Xi (repeat)")
            elif name == "quotient":
                sub.add_argument("--xi", type=int, help="single element to test (default: all of Z_p)")
            elif name == "bsg":
                sub.add_argument("--graph", choices=("full", "popular"), default="full")

    def handle(self, args, out) -> int:
        prime = get_prime(args.p)

        def spec(value: str) -> FpSet:
            return parse_set_spec(prime, value)

        target = args.target
        if target == "ruzsa3":
            payload = verify_ruzsa_triangle(spec(args.x), spec(args.y), spec(args.z)).to_json()
        elif target == "ruzsaK":
            payload = verify_ruzsa_sums(spec(args.y), [spec(x) for x in args.x]).to_json()
        elif target == "dilate":
            _, report = best_dilate(spec(args.x), spec(args.y), spec(args.g))
            payload = report.to_json()
        elif target == "cover":
            _, report = verify_cover(spec(args.x1), spec(args.x2), args.eps)
            payload = report.to_json()
        elif target == "quotient":
            xis = None if args.xi is None else [args.xi]
            payload = verify_quotient(spec(args.x), spec(args.y), xis).to_json()
        elif target == "bsg":
            A, B = spec(args.a), spec(args.b)
            graph = PairGraph.complete(A, B) if args.graph == "full" else popular_sum_graph(A, B, args.k)[0]
            witness = BsgWitness(spec(args.a_prime), spec(args.b_prime), args.q, args.k)
            payload = verify_bsg_witness(A, B, graph, args.k, witness).to_json()
        elif target == "garaev":
            payload = garaev_ratio(spec(args.a), spec(args.b)).to_json()
        elif target == "popular":
            _, report = popular_sum_graph(spec(args.a), spec(args.b), args.k)
            payload = report.to_json()
        elif target == "shifts":
            A, B = spec(args.a), spec(args.b)
            chosen = select_high_energy_shifts(A, B, args.tau)
            payload = {
                "name": "high-energy-shifts",
                "p": prime.p,
                "tau": args.tau,
                "elements": chosen.to_list(),
                "energies": shift_energy_sum(A, B).per_shift,
            }
        else:
            payload = dilate_sumset_ceiling(spec(args.a), spec(args.b)).to_json()
        self._api.logger(f"[verify] {target} p={prime.p}")
        out.write(dumps(payload) + "\n")
        return 0
