from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ContractError
from .fpset import FpSet, check_same_modulus


@dataclass(frozen=True, eq=False)
class PairGraph:
    left: FpSet
    right: FpSet
    rows: np.ndarray
    edge_count: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        check_same_modulus(self.left, self.right)
        rows = np.asarray(self.rows, dtype=bool)
        if rows.shape != (self.left.card, self.left.p):
            raise ContractError(
                f"graph rows must have shape ({self.left.card}, {self.left.p}), got {rows.shape}"
            )
        if np.any(rows & ~self.right.members[None, :]):
            raise ContractError("graph edge endpoint outside the right ground set")
        if rows.flags.writeable:
            rows = rows.copy()
            rows.flags.writeable = False
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "edge_count", int(np.count_nonzero(rows)))

    @classmethod
    def complete(cls, left: FpSet, right: FpSet) -> "PairGraph":
        rows = np.repeat(right.members[None, :], left.card, axis=0)
        return cls(left, right, rows)

    @classmethod
    def from_edges(cls, left: FpSet, right: FpSet, edges: Iterable[tuple[int, int]]) -> "PairGraph":
        check_same_modulus(left, right)
        index = {a: i for i, a in enumerate(left.to_list())}
        rows = np.zeros((left.card, left.p), dtype=bool)
        for a, b in edges:
            a, b = int(a) % left.p, int(b) % left.p
            if a not in index or b not in right:
                raise ContractError(f"edge ({a}, {b}) is not in A x B")
            rows[index[a], b] = True
        return cls(left, right, rows)

    def __len__(self) -> int:
        return self.edge_count


def partial_sumset(G: PairGraph) -> FpSet:
    out = np.zeros(G.left.p, dtype=bool)
    for a, row in zip(G.left.elements(), G.rows):
        if row.any():
            out |= np.roll(row, int(a))
    return FpSet(G.left.modulus, out)
