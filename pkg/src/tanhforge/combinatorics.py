"""Multi-index enumeration, multinomial coefficients and cardinality bounds."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache

from .errors import CapacityError, ContractViolation

_DEFAULT_CAP = 10**6


def _capacity_cap() -> int:
    return int(os.environ.get("TANHFORGE_CAP", _DEFAULT_CAP))


@dataclass(frozen=True)
class MultiIndex:
    """A d-tuple of non-negative integers."""

    entries: tuple[int, ...]

    def __post_init__(self):
        if any(e < 0 for e in self.entries):
            raise ContractViolation(f"multi-index entries must be >= 0, got {self.entries}")

    @property
    def degree(self) -> int:
        return sum(self.entries)

    @property
    def dimension(self) -> int:
        return len(self.entries)

    def __le__(self, other: "MultiIndex") -> bool:
        return all(a <= b for a, b in zip(self.entries, other.entries))

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def factorial(self) -> int:
        out = 1
        for e in self.entries:
            out *= math.factorial(e)
        return out


def _compositions_desc(n: int, d: int):
    # all d-tuples summing to n, lexicographically descending
    if d == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions_desc(n - first, d - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class MultiIndexSet:
    """P_{n,d}: all d-dim multi-indices of total degree n, lex-descending."""

    n: int
    d: int
    members: tuple[MultiIndex, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i: int) -> MultiIndex:
        return self.members[i]

    def position(self, alpha: MultiIndex) -> int:
        """The bijection iota onto {0..|P|-1}."""
        try:
            return self.members.index(alpha)
        except ValueError:
            raise ContractViolation(f"{alpha.entries} not in P_{{{self.n},{self.d}}}") from None


@lru_cache(maxsize=None)
def enumerate_indices(n: int, d: int) -> MultiIndexSet:
    """Enumerate P_{n,d} in lexicographic descending order."""
    if n < 0 or d < 1:
        raise ContractViolation(f"need n >= 0 and d >= 1, got n={n}, d={d}")
    size = math.comb(n + d - 1, n)
    if size > _capacity_cap():
        raise CapacityError(f"|P_{{{n},{d}}}| = {size} exceeds cap {_capacity_cap()}")
    members = tuple(MultiIndex(t) for t in _compositions_desc(n, d))
    assert len(members) == size
    return MultiIndexSet(n=n, d=d, members=members)


def enumerate_up_to(n: int, d: int) -> list[MultiIndex]:
    """All multi-indices of total degree <= n, degree-major then lex-descending."""
    out: list[MultiIndex] = []
    for m in range(n + 1):
        out.extend(enumerate_indices(m, d).members)
    return out


def multinomial(n: int, beta) -> int:
    """n! / beta! for |beta| = n."""
    beta = beta if isinstance(beta, MultiIndex) else MultiIndex(tuple(beta))
    if beta.degree != n:
        raise ContractViolation(f"|beta| = {beta.degree} but n = {n}")
    return math.factorial(n) // beta.factorial()


def cardinality_bounds(n: int, d: int) -> tuple[int, float, float]:
    """Exact |P_{n,d}| plus the two sqrt(pi)-scaled upper bounds."""
    if d < 2:
        raise ContractViolation("bounds stated for d >= 2")
    exact = math.comb(n + d - 1, n)
    root_pi = math.sqrt(math.pi)
    bound_nd = root_pi * math.e ** (d - 1) * max(n, 1) ** (d - 1)
    bound_dn = root_pi * math.e**n * max(d - 1, 1) ** n
    return exact, bound_nd, bound_dn
