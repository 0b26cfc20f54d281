from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable

import numpy as np

from .config import log
from .energy import additive_energy, collision_counts, multiplicative_energy, shift_energy_sum
from .errors import ContractError, InternalError, PreconditionError
from .fpset import FpSet, check_same_modulus, diffset, dilate, quotient_set, rep_fn_diff, rep_fn_sum, sumset
from .graph import PairGraph, partial_sumset
from .setspec import jsonable

Number = int | Fraction | float

# Relative slack for the comparisons that involve ln, sqrt or fractional powers.
FLOAT_SLACK = 2.0**-40


@dataclass(frozen=True)
class LemmaReport:
    name: str
    lhs: Number
    rhs: Number
    holds: bool
    relation: str = "<="
    checks: dict[str, bool] = field(default_factory=dict)
    witness: dict[str, Any] = field(default_factory=dict)
    slack: float | None = None

    def to_json(self) -> dict[str, Any]:
        payload = {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "holds": self.holds,
            "checks": self.checks,
            "witness": self.witness,
        }
        if self.slack is not None:
            payload["slack"] = self.slack
        return jsonable(payload)


class CoverSign(str, Enum):
    PLUS = "plus"
    MINUS = "minus"


@dataclass(frozen=True)
class CoverResult:
    translates: list[int]
    sign: CoverSign
    covered: int
    epsilon: Fraction
    bound: float
    bound_ceiling: int

    def to_json(self) -> dict[str, Any]:
        return jsonable(
            {
                "translates": self.translates,
                "sign": self.sign,
                "covered": self.covered,
                "epsilon": self.epsilon,
                "bound": self.bound,
                "bound_ceiling": self.bound_ceiling,
            }
        )


@dataclass(frozen=True)
class GaraevReport:
    lhs: Fraction
    L: Fraction
    empirical_C: float | None
    degenerate_L: bool

    def to_json(self) -> dict[str, Any]:
        return jsonable(
            {
                "name": "garaev",
                "lhs": self.lhs,
                "L": self.L,
                "empirical_C": self.empirical_C,
                "degenerate_L": self.degenerate_L,
            }
        )


@dataclass(frozen=True)
class BsgWitness:
    Aprime: FpSet
    Bprime: FpSet
    Q: int
    K: Fraction

    def __post_init__(self) -> None:
        check_same_modulus(self.Aprime, self.Bprime)
        if int(self.Q) < 1:
            raise ContractError(f"witness Q must be a positive integer, got {self.Q}")
        object.__setattr__(self, "Q", int(self.Q))
        object.__setattr__(self, "K", to_rational(self.K, "K"))


def to_rational(value: Any, label: str) -> Fraction:
    try:
        return value if isinstance(value, Fraction) else Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise PreconditionError(f"{label} must be a rational number, got {value!r}") from exc


def _holds(lhs: Number, rhs: Number, relation: str) -> bool:
    return lhs < rhs if relation == "<" else lhs <= rhs


def _loose_le(lhs: float, rhs: float) -> bool:
    return lhs <= rhs * (1.0 + FLOAT_SLACK) if rhs >= 0 else lhs <= rhs * (1.0 - FLOAT_SLACK)


def _require_nonempty(*sets: FpSet) -> None:
    for X in sets:
        if X.card == 0:
            raise PreconditionError("sets must be nonempty")


def _require_units(X: FpSet, label: str) -> None:
    if X.card == 0:
        raise PreconditionError(f"{label} must be nonempty")
    if X.members[0]:
        raise PreconditionError(f"{label} must lie in Z_p* (0 in {label})")


def verify_ruzsa_triangle(X: FpSet, Y: FpSet, Z: FpSet) -> LemmaReport:
    check_same_modulus(X, Y, Z)
    _require_nonempty(X, Y, Z)
    xy = diffset(X, Y).card
    yz = diffset(Y, Z).card
    lhs = diffset(X, Z).card
    rhs = Fraction(xy * yz, Y.card)
    return LemmaReport(
        "ruzsa-triangle", lhs, rhs, _holds(lhs, rhs, "<="),
        witness={"X-Y": xy, "Y-Z": yz, "Y": Y.card},
    )


def verify_ruzsa_sums(Y: FpSet, Xs: list[FpSet]) -> LemmaReport:
    if not Xs:
        raise PreconditionError("need at least one summand")
    check_same_modulus(Y, *Xs)
    _require_nonempty(Y, *Xs)
    total = Xs[0]
    for X in Xs[1:]:
        total = sumset(total, X)
    sizes = [sumset(Y, X).card for X in Xs]
    lhs = total.card
    rhs = Fraction(math.prod(sizes), Y.card ** (len(Xs) - 1))
    return LemmaReport(
        "ruzsa-sums", lhs, rhs, _holds(lhs, rhs, "<="),
        witness={"k": len(Xs), "Y+Xi": sizes},
    )


def popular_sum_graph(A: FpSet, B: FpSet, K: Any) -> tuple[PairGraph, LemmaReport]:
    # first t, from the top, whose graph {r_{A+B}(a+b) >= t} is dense with few sums
    check_same_modulus(A, B)
    _require_nonempty(A, B)
    K = to_rational(K, "K")
    if K < 1:
        raise PreconditionError(f"K must be >= 1, got {K}")
    ab = A.card * B.card
    energy = additive_energy(A, B).value
    # E > (ab)^{3/2} / K, squared on both sides
    if (energy * K) ** 2 <= ab**3:
        raise PreconditionError(
            f"hypothesis E+(A,B) > (|A||B|)^(3/2)/K fails: E+={energy}, K={K}, |A||B|={ab}"
        )
    r = rep_fn_sum(A, B).counts.astype(np.int64)
    sum_bound = 4 * K * K * ab
    for t in sorted({int(v) for v in np.unique(r) if v > 0}, reverse=True):
        heavy = r >= t
        edges = int(r[heavy].sum())
        sums = int(np.count_nonzero(heavy))
        if 2 * K * edges > ab and sums * sums < sum_bound:
            rows = np.stack([B.members & np.roll(heavy, -int(a)) for a in A.elements()])
            graph = PairGraph(A, B, rows)
            partial = partial_sumset(graph).card
            if len(graph) != edges or partial != sums:
                raise InternalError(f"threshold graph miscounted at t={t}")
            log("lemmas", f"popular graph t={t} |G|={edges} |A+_G B|={partial}")
            report = LemmaReport(
                "popular-sum-graph", partial * partial, sum_bound, True, relation="<",
                checks={"hypothesis": True, "dense": True, "small_sums": True},
                witness={
                    "threshold": t,
                    "edges": edges,
                    "edges_needed": Fraction(ab, 1) / (2 * K),
                    "partial_sumset": partial,
                    "energy": energy,
                },
            )
            return graph, report
    raise InternalError(f"no threshold graph found although E+={energy} satisfies the hypothesis")


def best_dilate(X: FpSet, Y: FpSet, G: FpSet) -> tuple[int, LemmaReport]:
    # ties go to the smallest xi
    check_same_modulus(X, Y, G)
    _require_nonempty(X, Y)
    _require_units(G, "G")
    counts = collision_counts(X, Y, G.to_list())
    xi = min(counts, key=lambda k: (counts[k], k))
    collisions = counts[xi]
    xy = X.card * Y.card
    size = sumset(X, dilate(xi, Y)).card
    averaged = Fraction(xy * G.card, xy + G.card)
    cauchy = Fraction(xy * xy, collisions)
    total = sum(counts.values())
    checks = {
        "averaged": averaged <= size,
        # Cauchy-Schwarz gives >=; equality happens when every fibre has the same size
        "cauchy_schwarz": cauchy <= size,
        "collision_sum": total <= xy * G.card + xy * xy,
    }
    report = LemmaReport(
        "best-dilate", averaged, size, all(checks.values()),
        checks=checks,
        witness={
            "xi": xi,
            "collisions": collisions,
            "cauchy_bound": cauchy,
            "cauchy_strict": cauchy < size,
            "collision_sum": total,
        },
    )
    return xi, report


def in_quotient_set(xi: int, X: FpSet, Y: FpSet) -> bool:
    check_same_modulus(X, Y)
    if Y.card <= 1:
        raise ContractError(f"quotient set needs |Y| > 1, got {Y.card}")
    return sumset(X, dilate(xi, Y)).card < X.card * Y.card


def verify_quotient(X: FpSet, Y: FpSet, xis: Iterable[int] | None = None) -> LemmaReport:
    Q = quotient_set(X, Y)
    candidates = range(X.p) if xis is None else [X.modulus.reduce(x) for x in xis]
    mismatches = [xi for xi in candidates if in_quotient_set(xi, X, Y) != (xi in Q)]
    checked = len(candidates)
    witness: dict[str, Any] = {"checked": checked, "mismatches": mismatches[:16], "quotient_size": Q.card}
    if xis is not None and checked == 1:
        witness["member"] = candidates[0] in Q
    return LemmaReport("quotient", len(mismatches), 0, not mismatches, witness=witness)


def greedy_cover(X1: FpSet, X2: FpSet, eps: Any) -> CoverResult:
    # largest overlap with what is left wins, smallest t on ties
    check_same_modulus(X1, X2)
    _require_nonempty(X1, X2)
    eps = to_rational(eps, "eps")
    if not 0 < eps < 1:
        raise PreconditionError(f"eps must lie in (0, 1), got {eps}")
    plus = sumset(X1, X2).card
    minus = diffset(X1, X2).card
    sign = CoverSign.PLUS if plus <= minus else CoverSign.MINUS
    bound = math.log(1 / eps) * min(plus, minus) / X2.card
    rest = X1
    translates: list[int] = []
    while rest.card * eps.denominator >= eps.numerator * X1.card:
        overlap = rep_fn_diff(rest, X2).counts
        t = int(np.argmax(overlap))
        if overlap[t] == 0:
            raise InternalError("cover round made no progress")
        translates.append(t)
        rest = FpSet(rest.modulus, rest.members & ~np.roll(X2.members, t))
    covered = X1.card - rest.card
    log("lemmas", f"cover |X1|={X1.card} translates={len(translates)} bound={bound:.6g}")
    return CoverResult(translates, sign, covered, eps, bound, math.ceil(bound))


def verify_cover(X1: FpSet, X2: FpSet, eps: Any) -> tuple[CoverResult, LemmaReport]:
    result = greedy_cover(X1, X2, eps)
    checks = {
        "coverage": result.covered * result.epsilon.denominator
        >= (result.epsilon.denominator - result.epsilon.numerator) * X1.card,
        "translate_count": len(result.translates) <= result.bound_ceiling,
    }
    report = LemmaReport(
        "cover", len(result.translates), result.bound_ceiling, all(checks.values()),
        checks=checks,
        witness=result.to_json(),
    )
    return result, report


def garaev_ratio(A: FpSet, B: FpSet) -> GaraevReport:
    check_same_modulus(A, B)
    _require_nonempty(A, B)
    a, b = A.card, B.card
    diff = diffset(A, A).card
    lhs = Fraction(diff * diff * a * a * b * b, multiplicative_energy(A, B).value)
    L = min(Fraction(b), Fraction(A.p, a))
    # log2 L <= 0 here; for 1 < L < 2 the ratio is reported but log2 L < 1 makes it loose
    if L <= 1:
        return GaraevReport(lhs, L, None, True)
    value = float(L)
    empirical = float(lhs) * math.log2(value) / (a**3 * value ** (1 / 9))
    return GaraevReport(lhs, L, empirical, False)


def verify_bsg_witness(A: FpSet, B: FpSet, G: PairGraph, K: Any, w: BsgWitness) -> LemmaReport:
    check_same_modulus(A, B, w.Aprime)
    _require_nonempty(A, B)
    if G.left != A or G.right != B:
        raise ContractError("graph must be a subset of A x B")
    K = to_rational(K, "K")
    if K <= 0:
        raise PreconditionError(f"K must be positive, got {K}")
    a, b = A.card, B.card
    if len(G) * K < a * b:
        raise PreconditionError(f"hypothesis |G| >= |A||B|/K fails: |G|={len(G)}, |A||B|/K={Fraction(a * b) / K}")
    ln_ea = 1.0 + math.log(a)
    k = float(K)
    root2 = math.sqrt(2.0)
    a_prime, b_prime, q = w.Aprime.card, w.Bprime.card, w.Q
    partial = partial_sumset(G).card
    full = sumset(w.Aprime, w.Bprime).card
    needed = full * q * b / (256.0 * k**3 * ln_ea)
    checks = {
        "A_prime_subset": w.Aprime.issubset(A),
        "B_prime_subset": w.Bprime.issubset(B),
        "A_prime_size": _loose_le(a / (4.0 * root2 * k), float(a_prime)),
        "B_prime_size": _loose_le(a * b / (8.0 * root2 * q * k * k * ln_ea), float(b_prime)),
        "Q_lower": _loose_le(a / (8.0 * root2 * k * k * ln_ea), float(q)),
        "Q_upper": q <= 2 * a_prime,
        "sumset_cube": _loose_le(needed, float(partial) ** 3),
    }
    return LemmaReport(
        "bsg-witness", needed, partial**3, all(checks.values()),
        checks=checks,
        witness={"A_prime": a_prime, "B_prime": b_prime, "Q": q, "partial_sumset": partial, "A_prime+B_prime": full},
        slack=FLOAT_SLACK,
    )


def select_high_energy_shifts(A: FpSet, B: FpSet, tau: int) -> FpSet:
    _require_units(B, "B")
    per_shift = shift_energy_sum(A, B).per_shift
    return FpSet.from_elements(B.modulus, [b for b, e in per_shift.items() if e > int(tau)])


def dilate_sumset_ceiling(A: FpSet, B: FpSet) -> LemmaReport:
    check_same_modulus(A, B)
    _require_nonempty(A)
    _require_units(B, "B")
    energies = shift_energy_sum(A, B).per_shift
    sizes = {b: sumset(A, dilate(b, A)).card for b in energies}
    products = {b: energies[b] * sizes[b] for b in energies}
    worst = min(products, key=lambda b: (products[b], b))
    widest = max(sizes, key=lambda b: (sizes[b], -b))
    target = A.card**4
    return LemmaReport(
        "dilate-sumset-ceiling", target, products[worst], _holds(target, products[worst], "<="),
        witness={"K": sizes[widest], "argmax_b": widest, "sizes": sizes, "energies": energies},
    )
