from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .config import log
from .errors import ContractError, InternalError, PreconditionError
from .fpset import FpSet, check_same_modulus, dilate, rep_fn_diff, rep_fn_sum
from .repfn import RepFn, cyclic_convolve_exact, exact_dot

# The naive oracles refuse inputs above this |A||B|.
NAIVE_LIMIT = 1 << 16


class EnergyMethod(str, Enum):
    NAIVE = "naive"
    CONVOLUTION = "convolution"


@dataclass(frozen=True)
class EnergyValue:
    value: int
    method: EnergyMethod

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class ShiftEnergySum:
    total: int
    per_shift: dict[int, int] = field(hash=False)
    normalized: Fraction


def _require_nonempty(*sets: FpSet) -> None:
    for X in sets:
        if X.card == 0:
            raise PreconditionError("energy of an empty set is undefined")


def _require_naive_size(A: FpSet, B: FpSet) -> None:
    if A.card * B.card > NAIVE_LIMIT:
        raise ContractError(f"naive oracle limited to |A||B| <= {NAIVE_LIMIT}, got {A.card * B.card}")


def naive_additive_energy(A: FpSet, B: FpSet) -> int:
    p = A.p
    a = A.to_list()
    b = B.to_list()
    da = Counter((x - y) % p for x in a for y in a)
    db = Counter((x - y) % p for x in b for y in b)
    return sum(count * db[d] for d, count in da.items())


def naive_multiplicative_energy(A: FpSet, B: FpSet) -> int:
    p = A.p
    a = A.to_list()
    b = B.to_list()
    pa = Counter(x * y % p for x in a for y in a)
    pb = Counter(x * y % p for x in b for y in b)
    return sum(count * pb[s] for s, count in pa.items())


def additive_energy(A: FpSet, B: FpSet, *, method: EnergyMethod | str = EnergyMethod.CONVOLUTION) -> EnergyValue:
    check_same_modulus(A, B)
    _require_nonempty(A, B)
    method = EnergyMethod(method)
    if method is EnergyMethod.NAIVE:
        _require_naive_size(A, B)
        return EnergyValue(naive_additive_energy(A, B), method)
    ra = rep_fn_diff(A, A)
    rb = ra if A == B else rep_fn_diff(B, B)
    value = exact_dot(ra.counts, rb.counts)
    dual = rep_fn_diff(A, B).squared_mass()
    if value != dual:
        raise InternalError(f"additive energy formulas disagree: {value} != {dual}")
    return EnergyValue(value, method)


def _log_indicator(X: FpSet) -> RepFn:
    prime = X.modulus
    mask = np.zeros(X.p - 1, dtype=bool)
    mask[prime.log_table[X.star().elements()]] = True
    return RepFn.indicator(mask)


def multiplicative_energy(
    A: FpSet, B: FpSet, *, method: EnergyMethod | str = EnergyMethod.CONVOLUTION
) -> EnergyValue:
    check_same_modulus(A, B)
    _require_nonempty(A, B)
    method = EnergyMethod(method)
    if method is EnergyMethod.NAIVE:
        _require_naive_size(A, B)
        return EnergyValue(naive_multiplicative_energy(A, B), method)
    zero_a = A.card * A.card - A.star().card ** 2
    zero_b = B.card * B.card - B.star().card ** 2
    nonzero = 0
    if A.star().card and B.star().card:
        la = _log_indicator(A)
        lb = la if A == B else _log_indicator(B)
        ra = cyclic_convolve_exact(la, la)
        rb = ra if A == B else cyclic_convolve_exact(lb, lb)
        nonzero = exact_dot(ra.counts, rb.counts)
    return EnergyValue(nonzero + zero_a * zero_b, method)


def collision_count(X: FpSet, Y: FpSet, xi: int) -> int:
    # full-range sum over s; equals E+(X, xi*Y) for xi != 0
    check_same_modulus(X, Y)
    xi = X.modulus.reduce(xi)
    if X.card == 0 or Y.card == 0:
        return 0
    if xi == 0:
        return X.card * Y.card * Y.card
    return rep_fn_sum(X, dilate(xi, Y)).squared_mass()


def _dilated_dot(r: np.ndarray, s: np.ndarray, b: int, p: int) -> int:
    perm = np.arange(p, dtype=np.int64) * pow(b, -1, p) % p
    return exact_dot(r, s[perm])


def collision_counts(X: FpSet, Y: FpSet, xis: list[int]) -> dict[int, int]:
    check_same_modulus(X, Y)
    _require_nonempty(X, Y)
    rx = rep_fn_diff(X, X).counts
    ry = rx if X == Y else rep_fn_diff(Y, Y).counts
    out: dict[int, int] = {}
    for xi in xis:
        xi = X.modulus.reduce(xi)
        if xi == 0:
            raise PreconditionError("collision table needs nonzero xi")
        out[xi] = _dilated_dot(rx, ry, xi, X.p)
    return out


def shift_energy_sum(A: FpSet, B: FpSet, *, method: EnergyMethod | str = EnergyMethod.CONVOLUTION) -> ShiftEnergySum:
    check_same_modulus(A, B)
    _require_nonempty(A, B)
    if B.members[0]:
        raise PreconditionError("shift set B must lie in Z_p* (0 in B)")
    method = EnergyMethod(method)
    shifts = B.to_list()
    per_shift: dict[int, int] = {}
    if method is EnergyMethod.NAIVE:
        for b in shifts:
            per_shift[b] = additive_energy(A, dilate(b, A), method=method).value
    else:
        r = rep_fn_diff(A, A).counts
        for b in shifts:
            per_shift[b] = _dilated_dot(r, r, b, A.p)
    total = sum(per_shift.values())
    log("energy", f"shift sum p={A.p} |A|={A.card} |B|={B.card} S={total}")
    return ShiftEnergySum(total, per_shift, Fraction(total, A.card**3 * B.card))
