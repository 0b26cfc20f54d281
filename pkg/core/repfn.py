from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ContractError
from .field import primitive_root

SCHOOLBOOK_LIMIT = 512
INT64_SAFE = (1 << 63) - 1

# (modulus, largest supported power-of-two transform exponent). Each modulus is
# below 2^31 so that products of two residues fit in int64.
NTT_MODULI = (
    (469762049, 26),
    (1811939329, 26),
    (2013265921, 27),
)


@dataclass(frozen=True, eq=False)
class RepFn:
    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 1 or counts.shape[0] == 0:
            raise ContractError("RepFn needs a non-empty 1-d count vector")
        if counts.dtype != object:
            counts = counts.astype(np.int64)
        elif counts.flags.writeable:
            counts = counts.copy()
        if (counts < 0).any():
            raise ContractError("RepFn counts must be nonnegative")
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    @property
    def length(self) -> int:
        return int(self.counts.shape[0])

    @property
    def mass(self) -> int:
        return int(sum(int(c) for c in self.counts)) if self.counts.dtype == object else int(self.counts.sum())

    def max_count(self) -> int:
        return int(max(self.counts)) if self.counts.dtype == object else int(self.counts.max())

    def __getitem__(self, index: int) -> int:
        return int(self.counts[index])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RepFn):
            return NotImplemented
        return self.length == other.length and all(
            int(a) == int(b) for a, b in zip(self.counts, other.counts)
        )

    def squared_mass(self) -> int:
        return exact_dot(self.counts, self.counts)

    def support(self) -> np.ndarray:
        return np.asarray(self.counts != 0, dtype=bool)

    @classmethod
    def indicator(cls, mask: np.ndarray) -> "RepFn":
        return cls(mask.astype(np.int64))


def exact_dot(u: np.ndarray, v: np.ndarray) -> int:
    # object dtype when int64 could overflow
    if u.shape != v.shape:
        raise ContractError(f"length mismatch: {u.shape[0]} != {v.shape[0]}")
    if u.shape[0] == 0:
        return 0
    if u.dtype != object and v.dtype != object:
        bound = int(np.abs(u).max()) * int(np.abs(v).max()) * int(u.shape[0])
        if bound <= INT64_SAFE:
            return int(np.dot(u, v))
    return int(np.dot(u.astype(object), v.astype(object)))


@lru_cache(maxsize=None)
def _root_of(modulus: int) -> int:
    return primitive_root(modulus)


@lru_cache(maxsize=32)
def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for i in range(bits):
        rev |= ((idx >> i) & 1) << (bits - 1 - i)
    return rev


def _powers(w: int, count: int, modulus: int) -> np.ndarray:
    out = np.ones(1, dtype=np.int64)
    while out.shape[0] < count:
        step = pow(w, out.shape[0], modulus)
        out = np.concatenate((out, out * step % modulus))
    return out[:count]


def _ntt(values: np.ndarray, modulus: int, *, invert: bool) -> np.ndarray:
    n = values.shape[0]
    a = values[_bit_reverse(n)] % modulus
    root = _root_of(modulus)
    length = 2
    while length <= n:
        w = pow(root, (modulus - 1) // length, modulus)
        if invert:
            w = pow(w, -1, modulus)
        half = length // 2
        twiddles = _powers(w, half, modulus)
        blocks = a.reshape(-1, length)
        u = blocks[:, :half]
        v = blocks[:, half:] * twiddles % modulus
        a = np.concatenate(((u + v) % modulus, (u - v) % modulus), axis=1).reshape(-1)
        length <<= 1
    if invert:
        a = a * pow(n, -1, modulus) % modulus
    return a


def _crt(residues: list[np.ndarray], moduli: list[int], bound: int) -> np.ndarray:
    # Garner mixed-radix digits: x = d0 + m0*d1 + m0*m1*d2 + ...
    digits: list[np.ndarray] = []
    for i, (r, m) in enumerate(zip(residues, moduli)):
        acc = np.zeros_like(r)
        radix = 1
        for j in range(i):
            acc = (acc + digits[j] % m * (radix % m)) % m
            radix *= moduli[j]
        inv = pow(radix % m, -1, m) if i else 1
        digits.append((r - acc) % m * inv % m)
    if bound <= INT64_SAFE:
        out = np.zeros_like(digits[0])
        radix = 1
        for d, m in zip(digits, moduli):
            out = out + d * radix
            radix *= m
        return out
    out_obj = np.zeros(digits[0].shape[0], dtype=object)
    radix = 1
    for d, m in zip(digits, moduli):
        out_obj = out_obj + d.astype(object) * radix
        radix *= m
    return out_obj


def _schoolbook_cyclic(u: np.ndarray, v: np.ndarray, bound: int) -> np.ndarray:
    n = u.shape[0]
    dtype = np.int64 if bound <= INT64_SAFE else object
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return (v.astype(dtype)[idx] * u.astype(dtype)[None, :]).sum(axis=1)


def _transform_cyclic(u: np.ndarray, v: np.ndarray, bound: int) -> np.ndarray:
    n = u.shape[0]
    size = 1 << (2 * n - 1).bit_length()
    chosen: list[int] = []
    product = 1
    for modulus, max_exp in NTT_MODULI:
        if size > (1 << max_exp):
            continue
        chosen.append(modulus)
        product *= modulus
        if product > bound:
            break
    if product <= bound:
        raise ContractError(
            f"convolution of length {n} with coefficient bound {bound} exceeds the exact transform range"
        )
    uu = np.zeros(size, dtype=np.int64)
    vv = np.zeros(size, dtype=np.int64)
    uu[:n] = np.asarray(u, dtype=np.int64)
    vv[:n] = np.asarray(v, dtype=np.int64)
    residues = []
    for modulus in chosen:
        fu = _ntt(uu, modulus, invert=False)
        fv = _ntt(vv, modulus, invert=False)
        residues.append(_ntt(fu * fv % modulus, modulus, invert=True))
    linear = _crt(residues, chosen, bound)
    out = linear[:n].copy()
    out[: n - 1] = out[: n - 1] + linear[n : 2 * n - 1]
    return out


def cyclic_convolve_exact(u: RepFn, v: RepFn) -> RepFn:
    if u.length != v.length:
        raise ContractError(f"length mismatch: {u.length} != {v.length}")
    n = u.length
    bound = n * max(u.max_count(), 0) * max(v.max_count(), 0)
    if bound == 0:
        return RepFn(np.zeros(n, dtype=np.int64))
    if n < SCHOOLBOOK_LIMIT:
        return RepFn(_schoolbook_cyclic(u.counts, v.counts, bound))
    if max(u.max_count(), v.max_count()) > INT64_SAFE:
        raise ContractError("transform inputs must fit in int64")
    return RepFn(_transform_cyclic(u.counts, v.counts, bound))
