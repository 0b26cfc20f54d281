from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from sympy import factorint

from .errors import ContractError

# Deterministic witness set for n < 2^64.
MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
PRIMALITY_LIMIT = 1 << 64


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in MR_BASES:
        if n % q == 0:
            return n == q
    if n >= PRIMALITY_LIMIT:
        raise ContractError(f"deterministic primality test limited to n < 2^64, got {n}")
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    order = p - 1
    factors = list(factorint(order).keys())
    for g in range(2, p):
        if all(pow(g, order // q, p) != 1 for q in factors):
            return g
    raise ContractError(f"no primitive root found for {p}")


@dataclass(frozen=True)
class Prime:
    p: int

    def __post_init__(self) -> None:
        if isinstance(self.p, bool) or not isinstance(self.p, int):
            raise ContractError(f"modulus must be an integer, got {self.p!r}")
        if not is_prime(self.p):
            raise ContractError(f"{self.p} is not prime")

    def __int__(self) -> int:
        return self.p

    @cached_property
    def generator(self) -> int:
        return primitive_root(self.p)

    @cached_property
    def exp_table(self) -> np.ndarray:
        p = self.p
        n = p - 1
        g = self.generator
        block = max(1, math.isqrt(n))
        small = np.empty(block, dtype=np.int64)
        acc = 1
        for i in range(block):
            small[i] = acc
            acc = acc * g % p
        step = acc
        rows = -(-n // block)
        big = np.empty(rows, dtype=np.int64)
        acc = 1
        for j in range(rows):
            big[j] = acc
            acc = acc * step % p
        table = ((big[:, None] * small[None, :]) % p).reshape(-1)[:n]
        table.flags.writeable = False
        return table

    @cached_property
    def log_table(self) -> np.ndarray:
        # log_table[0] = -1
        table = np.full(self.p, -1, dtype=np.int64)
        table[self.exp_table] = np.arange(self.p - 1, dtype=np.int64)
        table.flags.writeable = False
        return table

    def reduce(self, x: int) -> int:
        return int(x) % self.p

    def inverse(self, x: int) -> int:
        x = self.reduce(x)
        if x == 0:
            raise ContractError("0 has no multiplicative inverse")
        return pow(x, -1, self.p)

    def subgroup(self, d: int) -> np.ndarray:
        if d <= 0 or (self.p - 1) % d != 0:
            raise ContractError(f"subgroup order {d} does not divide p-1={self.p - 1}")
        step = (self.p - 1) // d
        return np.sort(self.exp_table[::step][:d])


@lru_cache(maxsize=64)
def get_prime(p: int) -> Prime:
    return Prime(int(p))
