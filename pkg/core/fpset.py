from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .config import max_modulus
from .errors import ContractError, ModulusMismatchError
from .field import Prime, get_prime
from .repfn import RepFn, cyclic_convolve_exact

# Below this many summands a sumset is an OR of rotated bitmaps.
ROLL_LIMIT = 64


@dataclass(frozen=True, eq=False)
class FpSet:
    modulus: Prime
    members: np.ndarray
    card: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        cap = max_modulus()
        if self.modulus.p > cap:
            raise ContractError(f"modulus {self.modulus.p} exceeds the dense-set cap {cap} (AFC_MAX_P)")
        members = np.asarray(self.members, dtype=bool)
        if members.shape != (self.modulus.p,):
            raise ContractError(f"membership bitmap must have length {self.modulus.p}")
        if members.flags.writeable:
            members = members.copy()
            members.flags.writeable = False
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "card", int(np.count_nonzero(members)))

    @property
    def p(self) -> int:
        return self.modulus.p

    @classmethod
    def from_elements(cls, modulus: Prime | int, elements: Iterable[int]) -> "FpSet":
        prime = modulus if isinstance(modulus, Prime) else get_prime(int(modulus))
        members = np.zeros(prime.p, dtype=bool)
        if isinstance(elements, np.ndarray) and elements.dtype.kind in "iu":
            values = elements.astype(np.int64, copy=False) % prime.p
        else:
            # reduce as Python ints first; literals may exceed int64
            values = np.fromiter((int(x) % prime.p for x in elements), dtype=np.int64)
        if values.size:
            members[values] = True
        return cls(prime, members)

    @classmethod
    def empty(cls, modulus: Prime | int) -> "FpSet":
        return cls.from_elements(modulus, ())

    @classmethod
    def full(cls, modulus: Prime | int) -> "FpSet":
        prime = modulus if isinstance(modulus, Prime) else get_prime(int(modulus))
        return cls(prime, np.ones(prime.p, dtype=bool))

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.members).astype(np.int64)

    def to_list(self) -> list[int]:
        return [int(x) for x in self.elements()]

    def star(self) -> "FpSet":
        if not self.members[0]:
            return self
        members = self.members.copy()
        members[0] = False
        return FpSet(self.modulus, members)

    def indicator(self) -> RepFn:
        return RepFn.indicator(self.members)

    def is_empty(self) -> bool:
        return self.card == 0

    def issubset(self, other: "FpSet") -> bool:
        check_same_modulus(self, other)
        return not bool(np.any(self.members & ~other.members))

    def __len__(self) -> int:
        return self.card

    def __contains__(self, x: int) -> bool:
        return bool(self.members[int(x) % self.p])

    def __iter__(self):
        return iter(self.to_list())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpSet):
            return NotImplemented
        return self.p == other.p and bool(np.array_equal(self.members, other.members))

    def __hash__(self) -> int:
        return hash((self.p, np.packbits(self.members).tobytes()))

    def __repr__(self) -> str:
        shown = self.to_list()
        if len(shown) > 12:
            return f"FpSet(p={self.p}, card={self.card}, [{', '.join(map(str, shown[:12]))}, ...])"
        return f"FpSet(p={self.p}, {shown})"


def check_same_modulus(*sets: FpSet) -> None:
    first = sets[0].p
    for other in sets[1:]:
        if other.p != first:
            raise ModulusMismatchError(f"sets live in Z_{first} and Z_{other.p}")


def _roll_sum(members: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    out = np.zeros_like(members)
    for s in shifts:
        out |= np.roll(members, int(s))
    return out


def _cyclic_sum_mask(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    nx = int(np.count_nonzero(x))
    ny = int(np.count_nonzero(y))
    if nx == 0 or ny == 0:
        return np.zeros_like(x)
    if min(nx, ny) <= ROLL_LIMIT:
        if nx <= ny:
            return _roll_sum(y, np.flatnonzero(x))
        return _roll_sum(x, np.flatnonzero(y))
    conv = cyclic_convolve_exact(RepFn.indicator(x), RepFn.indicator(y))
    return conv.support()


def sumset(X: FpSet, Y: FpSet) -> FpSet:
    check_same_modulus(X, Y)
    return FpSet(X.modulus, _cyclic_sum_mask(X.members, Y.members))


def negate(X: FpSet) -> FpSet:
    return dilate(X.p - 1, X)


def diffset(X: FpSet, Y: FpSet) -> FpSet:
    check_same_modulus(X, Y)
    return sumset(X, negate(Y))


def dilate(b: int, X: FpSet) -> FpSet:
    b = X.modulus.reduce(b)
    members = np.zeros(X.p, dtype=bool)
    if X.card:
        members[X.elements() * b % X.p] = True
    return FpSet(X.modulus, members)


def translate(h: int, X: FpSet) -> FpSet:
    return FpSet(X.modulus, np.roll(X.members, X.modulus.reduce(h)))


def prodset(X: FpSet, Y: FpSet) -> FpSet:
    check_same_modulus(X, Y)
    prime = X.modulus
    members = np.zeros(X.p, dtype=bool)
    if X.card == 0 or Y.card == 0:
        return FpSet(prime, members)
    if X.members[0] or Y.members[0]:
        members[0] = True
    xs, ys = X.star(), Y.star()
    if xs.card and ys.card:
        if min(xs.card, ys.card) <= ROLL_LIMIT:
            small, large = (xs, ys) if xs.card <= ys.card else (ys, xs)
            for y in small.elements():
                members[large.elements() * int(y) % X.p] = True
        else:
            logs = prime.log_table
            lx = np.zeros(X.p - 1, dtype=bool)
            ly = np.zeros(X.p - 1, dtype=bool)
            lx[logs[xs.elements()]] = True
            ly[logs[ys.elements()]] = True
            members[prime.exp_table[np.flatnonzero(_cyclic_sum_mask(lx, ly))]] = True
    return FpSet(prime, members)


def quotient_set(X: FpSet, Y: FpSet) -> FpSet:
    check_same_modulus(X, Y)
    if Y.card <= 1:
        raise ContractError(f"quotient set needs |Y| > 1, got {Y.card}")
    prime = X.modulus
    if X.card == 0:
        return FpSet.empty(prime)
    dx = diffset(X, X)
    dy = diffset(Y, Y).star()
    base = dx.elements()
    out = np.zeros(X.p, dtype=bool)
    for d in dy.elements():
        out[base * prime.inverse(int(d)) % X.p] = True
        if out.all():
            break
    return FpSet(prime, out)


def quotient_covers_field(X: FpSet) -> bool:
    if X.card <= 1:
        raise ContractError(f"quotient set needs |X| > 1, got {X.card}")
    if X.card * X.card > X.p:
        return True
    return quotient_set(X, X).card == X.p


def rep_fn_sum(X: FpSet, Y: FpSet) -> RepFn:
    check_same_modulus(X, Y)
    return cyclic_convolve_exact(X.indicator(), Y.indicator())


def rep_fn_diff(X: FpSet, Y: FpSet) -> RepFn:
    check_same_modulus(X, Y)
    return cyclic_convolve_exact(X.indicator(), negate(Y).indicator())
