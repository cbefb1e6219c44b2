"""Finite partial orders, component-wise products, and chain predicates.

Elements are dense indices ``0..size-1``; labels are for display only.  Sets
of elements are returned as ascending index lists.  Order relations are kept
as up-set bitmasks: bit ``j`` of ``up_mask(i)`` is set iff ``i <= j``.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from math import prod
from typing import Iterable, Iterator, Sequence

from .common import DEFAULT_CHAIN_CAP, CapExceeded, Check, iter_bits, mask_of


class PosetError(ValueError):
    pass


class OrderAxiomError(PosetError):
    """The relation handed to :func:`validate_poset` is not a partial order."""

    def __init__(self, axiom: str, witness: tuple):
        super().__init__(f"{axiom} violated by {witness}")
        self.axiom = axiom
        self.witness = witness


class _Order:
    size: int

    def up_mask(self, x: int) -> int:
        raise NotImplementedError

    def label(self, x: int) -> str:
        raise NotImplementedError

    def covers(self) -> list[tuple[int, int]]:
        raise NotImplementedError

    def leq(self, a: int, b: int) -> bool:
        return bool(self.up_mask(a) >> b & 1)

    def lt(self, a: int, b: int) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    @cached_property
    def _down_masks(self) -> tuple[int, ...]:
        down = [0] * self.size
        for a in range(self.size):
            for b in iter_bits(self.up_mask(a)):
                down[b] |= 1 << a
        return tuple(down)

    def down_mask(self, x: int) -> int:
        return self._down_masks[x]

    @cached_property
    def linear_extension(self) -> tuple[int, ...]:
        # a < b implies the down-set of a is a proper subset of that of b
        return tuple(sorted(range(self.size), key=lambda i: (self.down_mask(i).bit_count(), i)))

    def check_element(self, x: int) -> None:
        if not isinstance(x, int) or not 0 <= x < self.size:
            raise PosetError(f"unknown element {x!r}")


class FinitePoset(_Order):
    """An explicitly enumerated finite poset.

    Build one with :func:`validate_poset`, :meth:`from_covers`, :meth:`chain`
    or :meth:`antichain`; the constructor itself trusts its input.
    """

    def __init__(self, labels: Sequence[str], up_masks: Sequence[int]):
        self.labels = tuple(str(s) for s in labels)
        self._up = tuple(up_masks)
        self.size = len(self.labels)
        self._index = {s: i for i, s in enumerate(self.labels)}

    def up_mask(self, x: int) -> int:
        return self._up[x]

    def label(self, x: int) -> str:
        return self.labels[x]

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise PosetError(f"unknown element {label!r}") from None

    def relation(self) -> list[tuple[int, int]]:
        return [(a, b) for a in range(self.size) for b in iter_bits(self._up[a])]

    @cached_property
    def _covers(self) -> tuple[tuple[int, int], ...]:
        out = []
        for a in range(self.size):
            strict = self._up[a] & ~(1 << a)
            for b in iter_bits(strict):
                between = strict & self.down_mask(b) & ~(1 << b)
                if not between:
                    out.append((a, b))
        return tuple(out)

    def covers(self) -> list[tuple[int, int]]:
        return list(self._covers)

    @classmethod
    def from_covers(cls, labels: Sequence[str], covers: Iterable[tuple[str, str]]) -> "FinitePoset":
        """Reflexive-transitive closure of ``covers``; rejects cycles."""
        labels = list(labels)
        index = _label_index(labels)
        n = len(labels)
        up = [1 << i for i in range(n)]
        for a, b in covers:
            up[index[a]] |= 1 << index[b]
        changed = True
        while changed:
            changed = False
            for a in range(n):
                closed = up[a]
                for b in iter_bits(up[a]):
                    closed |= up[b]
                if closed != up[a]:
                    up[a] = closed
                    changed = True
        pairs = [(labels[a], labels[b]) for a in range(n) for b in iter_bits(up[a])]
        return validate_poset(labels, pairs)

    @classmethod
    def chain(cls, labels: Sequence[str]) -> "FinitePoset":
        labels = list(labels)
        return cls.from_covers(labels, zip(labels, labels[1:]))

    @classmethod
    def antichain(cls, labels: Sequence[str]) -> "FinitePoset":
        return cls.from_covers(list(labels), [])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FinitePoset) and self.labels == other.labels and self._up == other._up

    def __hash__(self) -> int:
        return hash((self.labels, self._up))

    def __repr__(self) -> str:
        return f"FinitePoset({list(self.labels)!r}, covers={[(self.labels[a], self.labels[b]) for a, b in self._covers]!r})"


def _label_index(labels: Sequence[str]) -> dict[str, int]:
    if not labels:
        raise PosetError("empty element list")
    index = {}
    for i, s in enumerate(labels):
        s = str(s)
        if s in index:
            raise PosetError(f"duplicate element label {s!r}")
        index[s] = i
    return index


def validate_poset(labels: Sequence[str], relation: Iterable[tuple[str, str]]) -> FinitePoset:
    """Check the three order axioms on an explicit relation.

    ``relation`` lists every pair ``(a, b)`` with ``a <= b``.  Raises
    :class:`OrderAxiomError` naming the first failing axiom (reflexive,
    antisymmetric, transitive, checked in that order) and its witness.
    """
    labels = [str(s) for s in labels]
    index = _label_index(labels)
    n = len(labels)
    up = [0] * n
    for a, b in relation:
        try:
            up[index[str(a)]] |= 1 << index[str(b)]
        except KeyError as exc:
            raise PosetError(f"relation mentions unknown element {exc.args[0]!r}") from None
    for a in range(n):
        if not up[a] >> a & 1:
            raise OrderAxiomError("reflexive", (labels[a], labels[a]))
    for a in range(n):
        for b in iter_bits(up[a]):
            if b > a and up[b] >> a & 1:
                raise OrderAxiomError("antisymmetric", (labels[a], labels[b]))
    for a in range(n):
        for b in iter_bits(up[a]):
            missing = up[b] & ~up[a]
            if missing:
                c = (missing & -missing).bit_length() - 1
                raise OrderAxiomError("transitive", (labels[a], labels[b], labels[c]))
    return FinitePoset(labels, up)


class ProductPoset(_Order):
    """Component-wise product of finite posets.

    Element indices are mixed-radix encodings of coordinate tuples with the
    first factor most significant, so ascending index is lexicographic order
    on tuples.
    """

    def __init__(self, factors: Sequence[FinitePoset]):
        if not factors:
            raise PosetError("product of an empty factor list")
        self.factors = tuple(factors)
        self.shape = tuple(f.size for f in self.factors)
        self.size = prod(self.shape)
        strides = []
        s = 1
        for n in reversed(self.shape):
            strides.append(s)
            s *= n
        self.strides = tuple(reversed(strides))

    def index(self, profile: Sequence[int]) -> int:
        if len(profile) != len(self.shape):
            raise PosetError(f"profile {tuple(profile)!r} has wrong length")
        idx = 0
        for x, n, s in zip(profile, self.shape, self.strides):
            if not isinstance(x, int) or not 0 <= x < n:
                raise PosetError(f"profile {tuple(profile)!r} has an invalid coordinate")
            idx += x * s
        return idx

    def profile(self, idx: int) -> tuple[int, ...]:
        return self._profiles[idx]

    @cached_property
    def _profiles(self) -> tuple[tuple[int, ...], ...]:
        return tuple(itertools.product(*(range(n) for n in self.shape)))

    def profiles(self) -> tuple[tuple[int, ...], ...]:
        return self._profiles

    def leq(self, a: int, b: int) -> bool:
        pa, pb = self._profiles[a], self._profiles[b]
        return all(f.leq(x, y) for f, x, y in zip(self.factors, pa, pb))

    def leq_profiles(self, x: Sequence[int], y: Sequence[int]) -> bool:
        return all(f.leq(a, b) for f, a, b in zip(self.factors, x, y))

    @cached_property
    def _up(self) -> tuple[int, ...]:
        coord_ups = [[list(iter_bits(f.up_mask(x))) for x in range(f.size)] for f in self.factors]
        out = []
        for p in self._profiles:
            m = 0
            for q in itertools.product(*(coord_ups[i][x] for i, x in enumerate(p))):
                m |= 1 << sum(c * s for c, s in zip(q, self.strides))
            out.append(m)
        return tuple(out)

    def up_mask(self, x: int) -> int:
        return self._up[x]

    def label(self, x: int) -> str:
        p = self._profiles[x]
        return "(" + ", ".join(f.label(c) for f, c in zip(self.factors, p)) + ")"

    def labels_of(self, profile: Sequence[int]) -> tuple[str, ...]:
        return tuple(f.label(c) for f, c in zip(self.factors, profile))

    def covers(self) -> list[tuple[int, int]]:
        out = []
        factor_covers = [f.covers() for f in self.factors]
        for idx, p in enumerate(self._profiles):
            for i, cov in enumerate(factor_covers):
                for a, b in cov:
                    if p[i] == a:
                        out.append((idx, idx + (b - a) * self.strides[i]))
        return out

    def omit(self, i: int) -> "ProductPoset":
        """The opponent profile poset obtained by dropping factor ``i``."""
        rest = self.factors[:i] + self.factors[i + 1:]
        if not rest:
            raise PosetError("cannot omit the only factor")
        return ProductPoset(rest)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProductPoset) and self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)


Poset = _Order


def product(factors: Sequence[FinitePoset]) -> ProductPoset:
    return ProductPoset(factors)


def upset(poset: Poset, x: int) -> list[int]:
    poset.check_element(x)
    return list(iter_bits(poset.up_mask(x)))


def _subset_mask(poset: Poset, subset: Iterable[int]) -> int:
    m = 0
    for x in subset:
        poset.check_element(x)
        m |= 1 << x
    return m


def is_chain(poset: Poset, subset: Iterable[int]) -> bool:
    items = sorted(set(subset))
    return all(poset.comparable(a, b) for a, b in itertools.combinations(items, 2))


def maximal_elements(poset: Poset, subset: Iterable[int]) -> list[int]:
    m = _subset_mask(poset, subset)
    if not m:
        raise PosetError("maximal_elements of an empty subset")
    return [s for s in iter_bits(m) if poset.up_mask(s) & m == 1 << s]


class _RankSpace:
    """Up-set masks re-indexed so bit position equals linear-extension rank.

    In this encoding the lowest set bit of any mask is a minimal element of
    that set, which makes "least element, if any" an O(1) probe.
    """

    def __init__(self, poset: Poset):
        self.order = poset.linear_extension
        self.rank = {x: r for r, x in enumerate(self.order)}
        self.up = tuple(self._remap(poset.up_mask(x)) for x in self.order)

    def _remap(self, mask: int) -> int:
        out = 0
        for b in iter_bits(mask):
            out |= 1 << self.rank[b]
        return out

    def remap(self, mask: int) -> int:
        return self._remap(mask)

    def to_elements(self, ranks: Iterable[int]) -> list[int]:
        return sorted(self.order[r] for r in ranks)


def _iter_chains(space: _RankSpace, within: int) -> Iterator[tuple[list[int], int]]:
    """Depth-first over nonempty chains inside ``within`` (rank space).

    Yields ``(chain_ranks, upper_bound_mask)`` where the mask is the
    intersection of the members' up-sets, accumulated independently of the
    fact that a finite chain's maximum bounds it.
    """
    stack: list[tuple[list[int], int, int]] = []
    for r in iter_bits(within):
        stack.append(([r], space.up[r], space.up[r] & within & ~(1 << r)))
    while stack:
        chain, ub, ext = stack.pop()
        yield chain, ub
        for r in iter_bits(ext):
            stack.append((chain + [r], ub & space.up[r], space.up[r] & ext & ~(1 << r)))


def is_chain_complete(poset: Poset, cap: int = DEFAULT_CHAIN_CAP) -> Check:
    """Every nonempty chain has a least upper bound.

    Nonempty finite posets always qualify; above ``cap`` elements that result
    is returned with a ``by-theorem`` certificate instead of enumerating.
    """
    if poset.size == 0:
        return Check(False, witness="empty poset")
    if poset.size > cap:
        return Check(True, certificate="by-theorem")
    space = _RankSpace(poset)
    for chain, ub in _iter_chains(space, (1 << poset.size) - 1):
        least = (ub & -ub).bit_length() - 1 if ub else None
        if least is None or ub & ~space.up[least]:
            return Check(False, witness=space.to_elements(chain))
    return Check(True)


def is_inductive(poset: Poset, subset: Iterable[int], cap: int = DEFAULT_CHAIN_CAP) -> Check:
    """Every chain inside ``subset`` has an upper bound inside ``subset``.

    The counterexample, if any, is the offending chain.
    """
    m = _subset_mask(poset, subset)
    if not m:
        raise PosetError("is_inductive of an empty subset")
    count = m.bit_count()
    if count > cap:
        return Check(True, certificate="by-theorem")
    space = _RankSpace(poset)
    within = space.remap(m)
    for chain, ub in _iter_chains(space, within):
        if not ub & within:
            return Check(False, witness=space.to_elements(chain))
    return Check(True)


def require_cap(what: str, size: int, cap: int) -> None:
    if size > cap:
        raise CapExceeded(what, size, cap)


__all__ = [
    "FinitePoset",
    "ProductPoset",
    "Poset",
    "PosetError",
    "OrderAxiomError",
    "validate_poset",
    "product",
    "upset",
    "is_chain",
    "is_chain_complete",
    "is_inductive",
    "maximal_elements",
    "mask_of",
    "require_cap",
]
