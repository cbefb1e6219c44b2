"""Set-valued maps on finite posets and an executable Theorem A check.

Theorem A (fixed points of increasing-upward maps on chain-complete posets):
if the map is increasing upward (A1), its values are universally inductive
(A2), and some ``y* <= v*`` with ``v* ∈ Γ(y*)`` exists (A3), then the fixed
point set is a nonempty inductive poset, so is its intersection with the
up-set of ``y*``, and a maximal fixed point above ``y*`` exists.

On finite posets "universally inductive" is checked as plain inductivity;
finite discrete spaces are compact Hausdorff, which is the case covered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .common import DEFAULT_CHAIN_CAP, Check, iter_bits
from .poset import Poset, PosetError, is_inductive, maximal_elements

A2_NOTE = "universally inductive is checked as inductive (finite-poset proxy)"


class EmptyValueError(ValueError):
    def __init__(self, x: int):
        super().__init__(f"set-valued map has an empty value at element {x}")
        self.x = x


class AscentStall(RuntimeError):
    """No ``v ∈ Γ(x)`` with ``v >= x`` during ascent: evidence against A1."""

    def __init__(self, x: int):
        super().__init__(f"ascent stalled at element {x}")
        self.x = x


class SetValuedMap:
    """``Γ: P -> 2^P \\ {∅}`` stored as one bitmask per domain element."""

    def __init__(self, domain: Poset, values: Sequence[Iterable[int]]):
        if len(values) != domain.size:
            raise ValueError("one value set per domain element is required")
        masks = []
        for x, vs in enumerate(values):
            m = 0
            for v in vs:
                domain.check_element(v)
                m |= 1 << v
            if not m:
                raise EmptyValueError(x)
            masks.append(m)
        self.domain = domain
        self.masks = tuple(masks)

    @classmethod
    def from_function(cls, domain: Poset, fn: Callable[[int], Iterable[int]]) -> "SetValuedMap":
        return cls(domain, [list(fn(x)) for x in range(domain.size)])

    def __call__(self, x: int) -> list[int]:
        return list(iter_bits(self.masks[x]))

    def contains(self, x: int, v: int) -> bool:
        return bool(self.masks[x] >> v & 1)


@dataclass(frozen=True)
class WitnessPair:
    y_star: int
    v_star: int


@dataclass
class TheoremAReport:
    a1: Check
    a1_subset: Check
    a2: Check
    witness: WitnessPair | None
    fixed_points: list[int]
    fixed_points_inductive: Check | None = None
    above_witness: list[int] = field(default_factory=list)
    above_witness_inductive: Check | None = None
    ascent_endpoint: int | None = None
    maximal_above_witness: int | None = None
    notes: list[str] = field(default_factory=lambda: [A2_NOTE])

    @property
    def hypotheses_hold(self) -> bool:
        return bool(self.a1) and bool(self.a2) and self.witness is not None

    @property
    def violations(self) -> list[str]:
        """Conclusions that failed although every hypothesis held."""
        if not self.hypotheses_hold:
            return []
        out = []
        if not self.fixed_points:
            out.append("fixed point set is empty")
        if self.fixed_points_inductive is not None and not self.fixed_points_inductive:
            out.append("fixed point set is not inductive")
        if not self.above_witness:
            out.append("no fixed point above the witness")
        if self.above_witness_inductive is not None and not self.above_witness_inductive:
            out.append("fixed points above the witness are not inductive")
        if self.maximal_above_witness is None:
            out.append("no maximal fixed point above the witness")
        return out


def _dominated(domain: Poset, u: int, mask: int) -> bool:
    return bool(domain.up_mask(u) & mask)


def is_increasing_upward(gamma: SetValuedMap) -> Check:
    """A1: for ``x <= y`` each ``u ∈ Γ(x)`` has some ``v ∈ Γ(y)`` with ``u <= v``.

    Domination composes along chains, so cover pairs suffice.  Witness
    ``(x, y, u)``.
    """
    dom = gamma.domain
    for x, y in dom.covers():
        target = gamma.masks[y]
        for u in iter_bits(gamma.masks[x]):
            if not _dominated(dom, u, target):
                return Check(False, witness=(x, y, u))
    return Check(True)


def is_increasing_upward_bruteforce(gamma: SetValuedMap) -> Check:
    dom = gamma.domain
    for x in range(dom.size):
        for y in iter_bits(dom.up_mask(x)):
            for u in iter_bits(gamma.masks[x]):
                if not any(dom.leq(u, v) for v in iter_bits(gamma.masks[y])):
                    return Check(False, witness=(x, y, u))
    return Check(True)


def has_subset_growth(gamma: SetValuedMap) -> Check:
    """The stronger form ``x <= y ⇒ Γ(x) ⊆ Γ(y)``; witness ``(x, y)``."""
    for x, y in gamma.domain.covers():
        if gamma.masks[x] & ~gamma.masks[y]:
            return Check(False, witness=(x, y))
    return Check(True)


def values_inductive(gamma: SetValuedMap, cap: int = DEFAULT_CHAIN_CAP) -> Check:
    """A2 proxy: every value set is inductive.  Witness: failing ``x``."""
    certificate = "enumerated"
    for x in range(gamma.domain.size):
        res = is_inductive(gamma.domain, gamma(x), cap=cap)
        if not res:
            return Check(False, witness=x)
        if res.certificate != "enumerated":
            certificate = res.certificate
    return Check(True, certificate=certificate)


def find_witness(gamma: SetValuedMap) -> WitnessPair | None:
    """A3: first ``y*`` in index order with some ``v* ∈ Γ(y*)``, ``y* <= v*``."""
    dom = gamma.domain
    for y in range(dom.size):
        above = gamma.masks[y] & dom.up_mask(y)
        if above:
            return WitnessPair(y, (above & -above).bit_length() - 1)
    return None


def fixed_points(gamma: SetValuedMap) -> list[int]:
    return [x for x in range(gamma.domain.size) if gamma.contains(x, x)]


def _ascend(gamma: SetValuedMap, start: int) -> int:
    dom = gamma.domain
    x = start
    for _ in range(dom.size + 1):
        cands = gamma.masks[x] & dom.up_mask(x)
        if not cands:
            raise AscentStall(x)
        tops = maximal_elements(dom, iter_bits(cands))
        v = tops[0]
        if v == x:
            return x
        x = v
    raise AssertionError("strict ascent exceeded the poset size")


def maximal_fixed_point_above(gamma: SetValuedMap, y_star: int) -> tuple[int, int]:
    """Ascend from ``y_star`` and return ``(ascent_endpoint, x*)``.

    The ascent moves to an order-maximal ``v ∈ Γ(x)`` with ``v >= x`` (lowest
    index on ties) until ``x`` itself is chosen.  Under A1 it ends at a fixed
    point above ``y_star``; ``x*`` is then the lowest-index maximal element of
    the fixed points above that endpoint, which is maximal among all fixed
    points above ``y_star``.
    """
    dom = gamma.domain
    dom.check_element(y_star)
    end = _ascend(gamma, y_star)
    if not gamma.contains(end, end):
        raise AssertionError("ascent ended off the fixed point set")
    fixed_mask = 0
    for x in fixed_points(gamma):
        fixed_mask |= 1 << x
    pool = fixed_mask & dom.up_mask(end)
    return end, maximal_elements(dom, iter_bits(pool))[0]


def verify_theorem_a(gamma: SetValuedMap, cap: int = DEFAULT_CHAIN_CAP) -> TheoremAReport:
    a1 = is_increasing_upward(gamma)
    report = TheoremAReport(
        a1=a1,
        a1_subset=has_subset_growth(gamma),
        a2=values_inductive(gamma, cap=cap),
        witness=find_witness(gamma),
        fixed_points=fixed_points(gamma),
    )
    if report.fixed_points:
        report.fixed_points_inductive = is_inductive(gamma.domain, report.fixed_points, cap=cap)
    if report.witness is not None:
        y = report.witness.y_star
        up = gamma.domain.up_mask(y)
        report.above_witness = [x for x in report.fixed_points if up >> x & 1]
        if report.above_witness:
            report.above_witness_inductive = is_inductive(gamma.domain, report.above_witness, cap=cap)
        if a1:
            try:
                report.ascent_endpoint, report.maximal_above_witness = maximal_fixed_point_above(gamma, y)
            except (AscentStall, PosetError):
                pass
    return report
