"""Finite posets backed by a boolean less-or-equal matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


def bool_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # float32 matmul hits BLAS; uint8 would overflow its accumulator
    return (A.astype(np.float32) @ B.astype(np.float32)) > 0.5


@dataclass(frozen=True)
class Poset:
    """Elements with a reflexive relation matrix leq[i, j] <=> e_i <= e_j.

    The matrix is taken at face value; ``check_partial_order`` reports
    whether it actually is reflexive, antisymmetric, and transitive.
    """

    elements: tuple
    leq: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = len(self.elements)
        if self.leq.shape != (n, n):
            raise ValueError("relation matrix shape mismatch")
        self.leq.setflags(write=False)

    def __len__(self) -> int:
        return len(self.elements)

    def index(self, element) -> int:
        return self.elements.index(element)

    def is_leq(self, a, b) -> bool:
        return bool(self.leq[self.index(a), self.index(b)])

    def check_partial_order(self) -> tuple[bool, str | None]:
        """(True, None) if leq is a partial order, else (False, witness)."""
        n = len(self.elements)
        diag = np.diagonal(self.leq)
        if not diag.all():
            i = int(np.argmin(diag))
            return False, f"not reflexive at {self.elements[i]!r}"
        sym = self.leq & self.leq.T & ~np.eye(n, dtype=bool)
        if sym.any():
            i, j = map(int, np.argwhere(sym)[0])
            return False, (
                f"antisymmetry fails: {self.elements[i]!r} and "
                f"{self.elements[j]!r} are mutually below each other"
            )
        closure = bool_matmul(self.leq, self.leq)
        gap = closure & ~self.leq
        if gap.any():
            i, j = map(int, np.argwhere(gap)[0])
            return False, (
                f"transitivity fails: {self.elements[i]!r} <= ... <= "
                f"{self.elements[j]!r} but not directly comparable"
            )
        return True, None

    @property
    def strict(self) -> np.ndarray:
        return self.leq & ~np.eye(len(self.elements), dtype=bool)

    def covers(self) -> np.ndarray:
        """covers[i, j] <=> e_j covers e_i (i < j with nothing in between)."""
        s = self.strict
        return s & ~bool_matmul(s, s)

    def maximal_indices(self) -> list[int]:
        s = self.strict
        return [i for i in range(len(self.elements)) if not s[i].any()]

    def minimal_indices(self) -> list[int]:
        s = self.strict
        return [j for j in range(len(self.elements)) if not s[:, j].any()]

    def dual(self) -> "Poset":
        return Poset(self.elements, self.leq.T.copy())


def poset_from_leq(elements: Sequence, leq: Callable[[object, object], bool]) -> Poset:
    """Build a poset from a pairwise comparison callable."""
    els = tuple(elements)
    n = len(els)
    mat = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if i == j or leq(els[i], els[j]):
                mat[i, j] = True
    return Poset(els, mat)


def poset_from_masks(
    elements: tuple, masks: Sequence[int], superset_below: bool = True
) -> Poset:
    """Poset of bitmask-coded sets ordered by inclusion.

    With ``superset_below`` (reverse inclusion, the C(G) convention) a mask
    is below another iff it contains it; otherwise plain inclusion.
    """
    arr = np.asarray(masks, dtype=np.int64)
    inter = arr[:, None] & arr[None, :]
    if superset_below:
        mat = inter == arr[None, :]  # row contains column
    else:
        mat = inter == arr[:, None]  # row contained in column
    return Poset(elements, mat)
