"""Finitely generated abelian grading groups and their bicharacters.

A group Z^r + Z_{m1} + ... + Z_{mk} is stored as a free rank plus a list of
torsion orders; elements are integer coordinate vectors with every torsion
slot reduced to [0, m).  A bicharacter keeps its values on generator pairs
only and is extended to arbitrary elements through the exponent formula

    eps(a, c) = prod_{i,j} gen_table[i][j] ** (a_i * c_j),

which is the unique extension multiplicative in both slots.  Everything
here is immutable and every operation is pure, so concurrent use over
independent inputs is safe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .report import CheckReport


class DomainError(ValueError):
    """An argument does not belong to the structure it is used with."""


def ipow(z: complex, n: int) -> complex:
    """``z**n`` for integer ``n`` by repeated squaring.

    Exact for values like -1, 1j and dyadic rationals, where the generic
    complex power may round through exp/log.
    """
    n = int(n)
    if n < 0:
        return 1.0 / ipow(z, -n)
    out = 1.0 + 0.0j
    base = complex(z)
    while n:
        if n & 1:
            out = out * base
        base = base * base
        n >>= 1
    return out


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank plus one cyclic factor per entry of ``torsion_orders``."""

    free_rank: int
    torsion_orders: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "free_rank", int(self.free_rank))
        object.__setattr__(self, "torsion_orders", tuple(int(m) for m in self.torsion_orders))
        if self.free_rank < 0:
            raise DomainError("free rank must be nonnegative")
        if any(m < 2 for m in self.torsion_orders):
            raise DomainError("torsion orders must be at least 2")

    @property
    def rank(self) -> int:
        return self.free_rank + len(self.torsion_orders)

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise DomainError(f"element has {len(coords)} coordinates, group needs {self.rank}")
        free = coords[: self.free_rank]
        tors = tuple(c % m for c, m in zip(coords[self.free_rank :], self.torsion_orders))
        return free + tors

    def element(self, coords: Sequence[int]) -> GroupElement:
        return GroupElement(self, self.reduce(coords))

    def zero(self) -> GroupElement:
        return self.element((0,) * self.rank)

    def span(self, free_span: int = 0) -> Iterator[GroupElement]:
        """All elements whose free coordinates lie in [-free_span, free_span]."""
        ranges = [range(-free_span, free_span + 1)] * self.free_rank
        ranges += [range(m) for m in self.torsion_orders]
        for coords in itertools.product(*ranges):
            yield self.element(coords)


@dataclass(frozen=True)
class GroupElement:
    group: AbelianGroup
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", self.group.reduce(self.coords))

    def __add__(self, other: GroupElement) -> GroupElement:
        self._same_group(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> GroupElement:
        return GroupElement(self.group, tuple(-c for c in self.coords))

    def __sub__(self, other: GroupElement) -> GroupElement:
        return self + (-other)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def _same_group(self, other: GroupElement) -> None:
        if self.group != other.group:
            raise DomainError("elements belong to different groups")

    def __str__(self) -> str:
        return "(" + ",".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class Bicharacter:
    """Commutation factor on an abelian group, stored on generator pairs.

    ``gen_table[i][j]`` is the value on the generator pair (e_i, e_j);
    every entry must be nonzero.  Values on arbitrary elements come from
    the bilinear exponent formula, so validating the table validates the
    whole map.
    """

    group: AbelianGroup
    gen_table: tuple[tuple[complex, ...], ...]
    tolerance: float = 1e-9

    def __post_init__(self) -> None:
        rows = tuple(tuple(complex(v) for v in row) for row in self.gen_table)
        object.__setattr__(self, "gen_table", rows)
        r = self.group.rank
        if len(rows) != r or any(len(row) != r for row in rows):
            raise DomainError(f"gen_table must be {r}x{r} for this group")
        if any(v == 0 for row in rows for v in row):
            raise DomainError("bicharacter values must be nonzero")
        if not self.tolerance > 0:
            raise DomainError("tolerance must be positive")

    def value(self, a: GroupElement, c: GroupElement) -> complex:
        if a.group != self.group or c.group != self.group:
            raise DomainError("element does not belong to the bicharacter's group")
        out = 1.0 + 0.0j
        for i, ai in enumerate(a.coords):
            if not ai:
                continue
            row = self.gen_table[i]
            for j, cj in enumerate(c.coords):
                if cj:
                    out *= ipow(row[j], ai * cj)
        return out

    __call__ = value

    def is_normalized(self) -> CheckReport:
        """eps(a,b)*eps(b,a) == 1 on generator pairs, which suffices by bilinearity."""
        worst, witness = 0.0, None
        for i, row in enumerate(self.gen_table):
            for j in range(self.group.rank):
                r = abs(row[j] * self.gen_table[j][i] - 1.0)
                if r > worst:
                    worst, witness = r, f"(e{i+1},e{j+1})"
        passed = worst <= self.tolerance
        return CheckReport("bicharacter-normalized", passed, worst, None if passed else witness)

    def validate_torsion(self) -> CheckReport:
        """Values against a torsion generator of order m must be m-th roots of unity.

        Otherwise the bilinear extension would not descend to the quotient
        group, i.e. the map would depend on the chosen representative.
        """
        worst, witness = 0.0, None
        for k, m in enumerate(self.group.torsion_orders):
            i = self.group.free_rank + k
            for j in range(self.group.rank):
                for a, b in ((i, j), (j, i)):
                    r = abs(ipow(self.gen_table[a][b], m) - 1.0)
                    if r > worst:
                        worst, witness = r, f"(e{a+1},e{b+1})"
        passed = worst <= self.tolerance
        return CheckReport("bicharacter-torsion", passed, worst, None if passed else witness)


def bilinearity_report(
    b: Bicharacter,
    triples: Iterable[tuple[GroupElement, GroupElement, GroupElement]],
) -> CheckReport:
    """Both functional equations of the bicharacter on the supplied triples."""
    worst, witness = 0.0, None
    for al, be, ga in triples:
        r1 = abs(b.value(al, be + ga) - b.value(al, be) * b.value(al, ga))
        r2 = abs(b.value(al + be, ga) - b.value(al, ga) * b.value(be, ga))
        r = max(r1, r2)
        if r > worst:
            worst, witness = r, f"({al},{be},{ga})"
    passed = worst <= b.tolerance
    return CheckReport("bicharacter-bilinearity", passed, worst, None if passed else witness)


def inverse_report(
    b: Bicharacter,
    pairs: Iterable[tuple[GroupElement, GroupElement]],
) -> CheckReport:
    """eps(-a, c) must invert eps(a, c)."""
    worst, witness = 0.0, None
    for al, ga in pairs:
        r = abs(b.value(-al, ga) * b.value(al, ga) - 1.0)
        if r > worst:
            worst, witness = r, f"({al},{ga})"
    passed = worst <= b.tolerance
    return CheckReport("bicharacter-inverse", passed, worst, None if passed else witness)
