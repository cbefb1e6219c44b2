"""Dual games: a static game played twice, with an operator ``A`` moving the
first-play profile to the second-play profile.

A split Nash equilibrium is a Nash profile ``x`` whose image ``Ax`` is again
unbeatable against the translated deviations ``Az``.  ``π(x)`` collects the
profiles that are best replies at ``x`` in both plays, and the split
equilibria are exactly the fixed points of ``Γ = π``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .common import DEFAULT_CAPS, Caps, CapExceeded, Check, iter_bits
from .fixedpoint import A2_NOTE, SetValuedMap, fixed_points, maximal_fixed_point_above, AscentStall
from .game import (
    GameError,
    Profile,
    StaticGame,
    assoc_vector,
    is_nash,
    is_order_positive,
    leq_n,
)
from .poset import ProductPoset, is_inductive

SUFFICIENCY_NOTE = (
    "conditions a)-d) are sufficient for existence; when one fails no conclusion is drawn "
    "and equilibria may still exist"
)


class ProfileOperator:
    """A total self-map of a profile space, stored as an index table."""

    def __init__(self, space: ProductPoset, table: Sequence[int]):
        if len(table) != space.size:
            raise GameError("operator table is not total")
        for t in table:
            if not isinstance(t, int) or not 0 <= t < space.size:
                raise GameError(f"operator image {t!r} is not a profile")
        self.space = space
        self.table = tuple(table)

    @classmethod
    def identity(cls, space: ProductPoset) -> "ProfileOperator":
        return cls(space, range(space.size))

    @classmethod
    def from_function(cls, space: ProductPoset, fn: Callable[[Profile], Profile]) -> "ProfileOperator":
        return cls(space, [space.index(tuple(fn(p))) for p in space.profiles()])

    def __call__(self, x: Profile) -> Profile:
        return self.space.profile(self.table[self.space.index(x)])

    def at(self, idx: int) -> int:
        return self.table[idx]

    def compose(self, inner: "ProfileOperator") -> "ProfileOperator":
        """``self ∘ inner``."""
        return ProfileOperator(self.space, [self.table[j] for j in inner.table])

    @property
    def is_identity(self) -> bool:
        return self.table == tuple(range(self.space.size))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProfileOperator) and self.table == other.table and self.space == other.space

    def __hash__(self) -> int:
        return hash(self.table)


@dataclass(frozen=True)
class DualGame:
    game: StaticGame
    operator: ProfileOperator

    def __post_init__(self):
        if self.operator.space != self.game.profiles:
            raise GameError("operator does not act on the game's profile space")


def is_increasing(op: ProfileOperator) -> Check:
    """``x <= y ⇒ A(x) <= A(y)``, checked on cover pairs.  Witness ``(x, y)``."""
    sp = op.space
    for a, b in sp.covers():
        if not sp.leq(op.table[a], op.table[b]):
            return Check(False, witness=(sp.profile(a), sp.profile(b)))
    return Check(True)


def is_increasing_bruteforce(op: ProfileOperator) -> Check:
    sp = op.space
    for a in range(sp.size):
        for b in iter_bits(sp.up_mask(a)):
            if not sp.leq(op.table[a], op.table[b]):
                return Check(False, witness=(sp.profile(a), sp.profile(b)))
    return Check(True)


def _reachable_coords(game: StaticGame, op: ProfileOperator) -> list[list[int]]:
    """For each player, the own-coordinates ``(Az)_i`` over all ``z``."""
    sp = game.profiles
    coords = [set() for _ in range(game.n)]
    for t in op.table:
        p = sp.profile(t)
        for i in range(game.n):
            coords[i].add(p[i])
    return [sorted(c) for c in coords]


def _stage_best(game: StaticGame, coords: list[list[int]], y_idx: int) -> list:
    """Per-player best achievable utility against ``y_{-i}`` using ``coords[i]``."""
    out = []
    for i in range(game.n):
        devs = game.deviations(i, y_idx)
        out.append(max(game.tables[i][devs[c]] for c in coords[i]))
    return out


def _stage_ok(game: StaticGame, best: list, y_idx: int, t_idx: int) -> bool:
    sp = game.profiles
    tp = sp.profile(t_idx)
    for i in range(game.n):
        if game.tables[i][game.deviations(i, y_idx)[tp[i]]] < best[i]:
            return False
    return True


class _PiTable:
    def __init__(self, dual: DualGame):
        self.game = dual.game
        self.op = dual.operator
        self.all_coords = [list(range(n)) for n in self.game.profiles.shape]
        self.op_coords = _reachable_coords(self.game, self.op)

    def value_mask(self, x_idx: int) -> int:
        g, op = self.game, self.op
        best1 = _stage_best(g, self.all_coords, x_idx)
        ax = op.table[x_idx]
        best2 = _stage_best(g, self.op_coords, ax)
        m = 0
        for t in range(g.profiles.size):
            if _stage_ok(g, best1, x_idx, t) and _stage_ok(g, best2, ax, op.table[t]):
                m |= 1 << t
        return m


def pi(dual: DualGame, x: Profile) -> list[Profile]:
    """Profiles that are best replies at ``x`` in the first play and whose
    images are best replies at ``Ax`` among the translated deviations."""
    sp = dual.game.profiles
    x_idx = sp.index(dual.game.check_profile(x))
    return [sp.profile(t) for t in iter_bits(_PiTable(dual).value_mask(x_idx))]


def pi_vector_form(dual: DualGame, x: Profile) -> list[Profile]:
    """Literal double loop over ``z`` with the vector order (oracle)."""
    g, A = dual.game, dual.operator
    x = g.check_profile(x)
    ax = A(x)
    out = []
    for t in g.profiles.profiles():
        at = A(t)
        if all(
            leq_n(assoc_vector(g, z, x), assoc_vector(g, t, x))
            and leq_n(assoc_vector(g, A(z), ax), assoc_vector(g, at, ax))
            for z in g.profiles.profiles()
        ):
            out.append(t)
    return out


def is_split_ne(dual: DualGame, x: Profile) -> Check:
    """Witness ``(i, z, stage)``: stage 1 is the first play, stage 2 the
    translated second play.  ``z`` is the most profitable deviation profile
    (lowest index on ties) for the first violating player."""
    g, A = dual.game, dual.operator
    sp = g.profiles
    x = g.check_profile(x)
    first = is_nash(g, x)
    if not first:
        i, z_i = first.witness
        return Check(False, witness=(i, x[:i] + (z_i,) + x[i + 1:], 1))
    x_idx = sp.index(x)
    ax_idx = A.table[x_idx]
    for i in range(g.n):
        devs = g.deviations(i, ax_idx)
        base = g.tables[i][ax_idx]
        best_z, best_v = None, base
        for z_idx in range(sp.size):
            v = g.tables[i][devs[sp.profile(A.table[z_idx])[i]]]
            if v > best_v:
                best_z, best_v = z_idx, v
        if best_z is not None:
            return Check(False, witness=(i, sp.profile(best_z), 2))
    return Check(True)


def split_ne_set(dual: DualGame, cap: int = DEFAULT_CAPS.profiles) -> list[Profile]:
    sp = dual.game.profiles
    if sp.size > cap:
        raise CapExceeded("profile space", sp.size, cap)
    g, A = dual.game, dual.operator
    all_coords = [list(range(n)) for n in sp.shape]
    op_coords = _reachable_coords(g, A)
    out = []
    for x_idx in range(sp.size):
        if not _stage_ok(g, _stage_best(g, all_coords, x_idx), x_idx, x_idx):
            continue
        ax = A.table[x_idx]
        if _stage_ok(g, _stage_best(g, op_coords, ax), ax, ax):
            out.append(sp.profile(x_idx))
    return out


def pi_masks(dual: DualGame) -> list[int]:
    table = _PiTable(dual)
    return [table.value_mask(x) for x in range(dual.game.profiles.size)]


def gamma(dual: DualGame) -> SetValuedMap:
    """``Γ = π`` as a set-valued map; raises EmptyValueError if some π(x) = ∅."""
    masks = pi_masks(dual)
    return SetValuedMap(dual.game.profiles, [list(iter_bits(m)) for m in masks])


@dataclass
class ExistenceReport:
    """Conditions a)-d) of an existence theorem and its checked conclusions.

    ``condition_b`` witnesses are the first profile whose value set is empty
    or not inductive.  Conclusions are only populated, and only asserted, when
    all four conditions hold.  ``fixed_point_crosscheck`` compares the
    equilibrium set with the fixed points of the value map and is computed
    regardless.
    """

    condition_a: Check
    condition_b: Check
    condition_c: Check
    condition_d: Check
    split_ne: list[Profile]
    fixed_point_crosscheck: bool | None = None
    inductive: Check | None = None
    above_witness: list[Profile] = field(default_factory=list)
    inductive_above_witness: Check | None = None
    maximal_above_witness: Profile | None = None
    monotone_growth: Check | None = None
    notes: list[str] = field(default_factory=lambda: [A2_NOTE, SUFFICIENCY_NOTE])

    @property
    def conditions_hold(self) -> bool:
        return all(bool(c) for c in (self.condition_a, self.condition_b, self.condition_c, self.condition_d))

    @property
    def violations(self) -> list[str]:
        if not self.conditions_hold:
            return [] if self.fixed_point_crosscheck in (None, True) else ["equilibria differ from fixed points"]
        out = []
        if not self.split_ne:
            out.append("equilibrium set is empty")
        if self.fixed_point_crosscheck is not True:
            out.append("equilibria differ from fixed points")
        if self.inductive is not None and not self.inductive:
            out.append("equilibrium set is not inductive")
        if not self.above_witness:
            out.append("no equilibrium above the witness")
        if self.inductive_above_witness is not None and not self.inductive_above_witness:
            out.append("equilibria above the witness are not inductive")
        if self.maximal_above_witness is None:
            out.append("no maximal equilibrium above the witness")
        if self.monotone_growth is not None and not self.monotone_growth:
            out.append("value sets do not grow along the order")
        return out


@dataclass
class SplitReport(ExistenceReport):
    pass


def order_positivity_all(game: StaticGame, cap: int) -> Check:
    for i in range(game.n):
        res = is_order_positive(game, i, cap=cap)
        if not res:
            return Check(False, witness=(i,) + res.witness)
    return Check(True)


def values_condition(space: ProductPoset, masks: list[int], cap: int) -> Check:
    certificate = "enumerated"
    for x, m in enumerate(masks):
        if not m:
            return Check(False, witness=(space.profile(x), "empty"))
        res = is_inductive(space, iter_bits(m), cap=cap)
        if not res:
            return Check(False, witness=(space.profile(x), "not inductive"))
        if res.certificate != "enumerated":
            certificate = res.certificate
    return Check(True, certificate=certificate)


def witness_condition(space: ProductPoset, masks: list[int]) -> Check:
    for x, m in enumerate(masks):
        above = m & space.up_mask(x)
        if above:
            u = (above & -above).bit_length() - 1
            return Check(True, witness=(space.profile(x), space.profile(u)))
    return Check(False)


def growth_check(space: ProductPoset, masks: list[int]) -> Check:
    """``x <= y ⇒ value(x) ⊆ value(y)`` on cover pairs; witness ``(x, y)``."""
    for a, b in space.covers():
        if masks[a] & ~masks[b]:
            return Check(False, witness=(space.profile(a), space.profile(b)))
    return Check(True)


def conclude(report, space: ProductPoset, masks: list[int], equilibria: list[Profile], caps: Caps) -> None:
    """Shared conclusion step for the dual and repeated existence checks."""
    eq_idx = [space.index(p) for p in equilibria]
    if all(masks):
        gmap = SetValuedMap(space, [list(iter_bits(m)) for m in masks])
        report.fixed_point_crosscheck = fixed_points(gmap) == eq_idx
    else:
        gmap = None
        report.fixed_point_crosscheck = [x for x, m in enumerate(masks) if m >> x & 1] == eq_idx
    if not report.conditions_hold:
        return
    report.monotone_growth = growth_check(space, masks)
    if not eq_idx:
        return
    report.inductive = is_inductive(space, eq_idx, cap=caps.chain)
    x_prime = space.index(report.condition_d.witness[0])
    up = space.up_mask(x_prime)
    above = [x for x in eq_idx if up >> x & 1]
    report.above_witness = [space.profile(x) for x in above]
    if above:
        report.inductive_above_witness = is_inductive(space, above, cap=caps.chain)
        try:
            _, top = maximal_fixed_point_above(gmap, x_prime)
            report.maximal_above_witness = space.profile(top)
        except AscentStall:
            pass


def check_theorem1(dual: DualGame, caps: Caps = DEFAULT_CAPS) -> SplitReport:
    g = dual.game
    sp = g.profiles
    if sp.size > caps.profiles:
        raise CapExceeded("profile space", sp.size, caps.profiles)
    masks = pi_masks(dual)
    report = SplitReport(
        condition_a=order_positivity_all(g, caps.profiles),
        condition_b=values_condition(sp, masks, caps.chain),
        condition_c=is_increasing(dual.operator),
        condition_d=witness_condition(sp, masks),
        split_ne=split_ne_set(dual, cap=caps.profiles),
    )
    conclude(report, sp, masks, report.split_ne, caps)
    return report
