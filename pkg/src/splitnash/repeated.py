"""Repeated games driven by an eventually periodic operator schedule.

Between plays the profile is moved by ``A_k``; the profile used in play
``k+1`` is ``Π_k x`` with ``Π_0 = I`` and ``Π_k = A_k ∘ Π_{k-1}``.  Because
the profile space is finite and the schedule is a finite prefix followed by
a repeating cycle, the pair (schedule phase, ``Π_k`` table) eventually
repeats.  Every "for all k" quantifier is therefore decided on the finite
window ``k < k0 + q``, and every discounted series has an exact closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .common import DEFAULT_CAPS, DEFAULT_CYCLE_CAP, Caps, CapExceeded, Check, RationalLike, iter_bits, parse_rational
from .dual import (
    SUFFICIENCY_NOTE,
    ExistenceReport,
    ProfileOperator,
    conclude,
    is_increasing,
    order_positivity_all,
    values_condition,
    witness_condition,
)
from .fixedpoint import A2_NOTE, SetValuedMap
from .game import GameError, Profile, StaticGame
from .poset import ProductPoset


class ScheduleError(ValueError):
    pass


class CycleNotFound(RuntimeError):
    def __init__(self, horizon: int):
        super().__init__(f"no repeated state within {horizon} steps")
        self.horizon = horizon


@dataclass(frozen=True)
class OperatorSchedule:
    """``A_1..A_m`` from ``prefix`` then ``cycle`` repeated forever.

    ``A_0`` is the identity and is never stored.
    """

    prefix: tuple[ProfileOperator, ...]
    cycle: tuple[ProfileOperator, ...]

    def __init__(self, prefix: Sequence[ProfileOperator], cycle: Sequence[ProfileOperator]):
        prefix, cycle = tuple(prefix), tuple(cycle)
        if not cycle:
            raise ScheduleError("schedule cycle must be nonempty")
        space = cycle[0].space
        if any(op.space != space for op in prefix + cycle):
            raise ScheduleError("schedule operators act on different profile spaces")
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "cycle", cycle)

    @classmethod
    def constant(cls, op: ProfileOperator) -> "OperatorSchedule":
        return cls((), (op,))

    @classmethod
    def identity(cls, space: ProductPoset) -> "OperatorSchedule":
        return cls.constant(ProfileOperator.identity(space))

    @property
    def space(self) -> ProductPoset:
        return self.cycle[0].space

    @property
    def operators(self) -> tuple[ProfileOperator, ...]:
        return self.prefix + self.cycle

    def operator(self, k: int) -> ProfileOperator:
        """``A_k`` for ``k >= 1``."""
        if k < 1:
            raise ScheduleError("A_k is stored for k >= 1 only")
        m = len(self.prefix)
        if k <= m:
            return self.prefix[k - 1]
        return self.cycle[(k - m - 1) % len(self.cycle)]

    def phase(self, k: int) -> int:
        """State of the schedule after ``k`` steps: which operator comes next."""
        m = len(self.prefix)
        return k if k < m else m + (k - m) % len(self.cycle)


class ComposedTrajectory:
    """Memoized ``Π_k`` tables with the detected preperiod and period."""

    def __init__(self, schedule: OperatorSchedule, cap: int = DEFAULT_CYCLE_CAP):
        self.schedule = schedule
        self.cap = cap
        self.tables: list[tuple[int, ...]] = [tuple(range(schedule.space.size))]
        self.k0: int | None = None
        self.q: int | None = None
        self._detect()

    def _detect(self) -> None:
        seen = {(self.schedule.phase(0), self.tables[0]): 0}
        k = 0
        while k < self.cap:
            k += 1
            op = self.schedule.operator(k)
            prev = self.tables[-1]
            self.tables.append(tuple(op.table[j] for j in prev))
            state = (self.schedule.phase(k), self.tables[-1])
            if state in seen:
                self.k0 = seen[state]
                self.q = k - self.k0
                self.tables.pop()
                return
            seen[state] = k

    @property
    def exact(self) -> bool:
        return self.k0 is not None

    @property
    def horizon(self) -> int:
        """Number of leading ``k`` values that decide every ``for all k``."""
        return self.k0 + self.q if self.exact else len(self.tables)

    def table(self, k: int) -> tuple[int, ...]:
        if k < len(self.tables):
            return self.tables[k]
        if not self.exact:
            raise CycleNotFound(self.cap)
        return self.tables[self.k0 + (k - self.k0) % self.q]


def compose_pi_k(schedule: OperatorSchedule, k: int) -> ProfileOperator:
    if k < 0:
        raise ScheduleError("k must be nonnegative")
    table = tuple(range(schedule.space.size))
    for j in range(1, k + 1):
        op = schedule.operator(j)
        table = tuple(op.table[t] for t in table)
    return ProfileOperator(schedule.space, table)


def detect_cycle(schedule: OperatorSchedule, cap: int = DEFAULT_CYCLE_CAP) -> tuple[int, int]:
    traj = ComposedTrajectory(schedule, cap=cap)
    if not traj.exact:
        raise CycleNotFound(traj.horizon)
    return traj.k0, traj.q


class RepeatedGame:
    def __init__(self, game: StaticGame, schedule: OperatorSchedule, rho: RationalLike, cycle_cap: int = DEFAULT_CYCLE_CAP):
        rho = parse_rational(rho)
        if not 0 < rho < 1:
            raise GameError(f"discount factor must lie in (0, 1), got {rho}")
        if schedule.space != game.profiles:
            raise ScheduleError("schedule does not act on the game's profile space")
        self.game = game
        self.schedule = schedule
        self.rho = rho
        self.cycle_cap = cycle_cap

    @cached_property
    def trajectory(self) -> ComposedTrajectory:
        return ComposedTrajectory(self.schedule, cap=self.cycle_cap)

    @cached_property
    def weights(self) -> tuple[Fraction, ...]:
        """Closed-form weight of each ``k`` in the decisive window.

        Prefix terms carry ``ρ^k``; each cycle term carries
        ``ρ^k / (1 - ρ^q)`` to account for all its periodic repeats.
        """
        traj = self.trajectory
        if not traj.exact:
            raise CycleNotFound(traj.horizon)
        tail = 1 / (1 - self.rho ** traj.q)
        return tuple(self.rho ** k * (tail if k >= traj.k0 else 1) for k in range(traj.horizon))

    @cached_property
    def _coords(self) -> list[list[list[int]]]:
        """``[k][i]``: own-coordinates ``(Π_k z)_i`` reachable from any ``z``."""
        sp = self.game.profiles
        out = []
        for k in range(self.trajectory.horizon):
            per = [set() for _ in range(self.game.n)]
            for t in self.trajectory.table(k):
                p = sp.profile(t)
                for i in range(self.game.n):
                    per[i].add(p[i])
            out.append([sorted(s) for s in per])
        return out


@dataclass(frozen=True)
class HorizonCheck:
    """A :class:`Check` over the ``k`` quantifier, flagged when the cycle was
    not found and only ``k < horizon`` was verified."""

    holds: bool
    witness: object = None
    partial: bool = False
    horizon: int = 0

    def __bool__(self) -> bool:
        return self.holds


def psi_mask(rg: RepeatedGame, x_idx: int) -> int:
    g = rg.game
    traj = rg.trajectory
    ok = (1 << g.profiles.size) - 1
    for k in range(traj.horizon):
        tab = traj.table(k)
        y = tab[x_idx]
        coords = rg._coords[k]
        best = [max(g.tables[i][g.deviations(i, y)[c]] for c in coords[i]) for i in range(g.n)]
        devs = [g.deviations(i, y) for i in range(g.n)]
        for t in iter_bits(ok):
            tp = g.profiles.profile(tab[t])
            if any(g.tables[i][devs[i][tp[i]]] < best[i] for i in range(g.n)):
                ok &= ~(1 << t)
        if not ok:
            break
    return ok


def psi(rg: RepeatedGame, x: Profile) -> tuple[list[Profile], bool]:
    """``ψ(x)`` and a flag that is True when the window was only partial."""
    sp = rg.game.profiles
    m = psi_mask(rg, sp.index(rg.game.check_profile(x)))
    return [sp.profile(t) for t in iter_bits(m)], not rg.trajectory.exact


def psi_bruteforce(rg: RepeatedGame, x: Profile) -> list[Profile]:
    """Literal evaluation over every ``t``, ``z``, ``i`` and ``k`` in the window (oracle)."""
    g = rg.game
    sp = g.profiles
    x_idx = sp.index(x)
    out = []
    for t in range(sp.size):
        good = True
        for k in range(rg.trajectory.horizon):
            tab = rg.trajectory.table(k)
            y = sp.profile(tab[x_idx])
            pt = sp.profile(tab[t])
            for z in range(sp.size):
                pz = sp.profile(tab[z])
                for i in range(g.n):
                    if g.f(i, y[:i] + (pz[i],) + y[i + 1:]) > g.f(i, y[:i] + (pt[i],) + y[i + 1:]):
                        good = False
                        break
                if not good:
                    break
            if not good:
                break
        if good:
            out.append(sp.profile(t))
    return out


def is_inf_split_ne(rg: RepeatedGame, x: Profile) -> HorizonCheck:
    """Equilibrium condition along the whole trajectory of ``x``.

    Witness ``(i, z, k)``: first violating ``(k, i)`` in lexicographic order,
    with ``z`` the deviation profile whose image gives player ``i`` the largest
    utility at step ``k`` (lowest index on ties).
    """
    g = rg.game
    sp = g.profiles
    x_idx = sp.index(g.check_profile(x))
    traj = rg.trajectory
    for k in range(traj.horizon):
        tab = traj.table(k)
        y = tab[x_idx]
        for i in range(g.n):
            devs = g.deviations(i, y)
            base = g.tables[i][y]
            best_z, best_v = None, base
            for z in range(sp.size):
                v = g.tables[i][devs[sp.profile(tab[z])[i]]]
                if v > best_v:
                    best_z, best_v = z, v
            if best_z is not None:
                return HorizonCheck(False, (i, sp.profile(best_z), k), not traj.exact, traj.horizon)
    return HorizonCheck(True, None, not traj.exact, traj.horizon)


def inf_split_ne_set(rg: RepeatedGame, cap: int = DEFAULT_CAPS.profiles) -> list[Profile]:
    g = rg.game
    sp = g.profiles
    if sp.size > cap:
        raise CapExceeded("profile space", sp.size, cap)
    traj = rg.trajectory
    alive = (1 << sp.size) - 1
    for k in range(traj.horizon):
        tab = traj.table(k)
        coords = rg._coords[k]
        for x in iter_bits(alive):
            y = tab[x]
            for i in range(g.n):
                devs = g.deviations(i, y)
                if max(g.tables[i][devs[c]] for c in coords[i]) > g.tables[i][y]:
                    alive &= ~(1 << x)
                    break
    return [sp.profile(x) for x in iter_bits(alive)]


def _series(rg: RepeatedGame, terms) -> Fraction:
    return sum((w * v for w, v in zip(rg.weights, terms)), Fraction(0))


def h(rg: RepeatedGame, i: int, x: Profile) -> Fraction:
    """Exact ``Σ_k ρ^k f_i(Π_k x)``."""
    g = rg.game
    x_idx = g.profiles.index(g.check_profile(x))
    traj = rg.trajectory
    return _series(rg, (g.tables[i][traj.table(k)[x_idx]] for k in range(traj.horizon)))


def H(rg: RepeatedGame, i: int, z: Profile, x: Profile) -> Fraction:
    """Exact ``Σ_k ρ^k f_i((Π_k z)_i, (Π_k x)_{-i})``."""
    g = rg.game
    sp = g.profiles
    z_idx = sp.index(g.check_profile(z))
    x_idx = sp.index(g.check_profile(x))
    traj = rg.trajectory
    return _series(rg, (_mixed(g, i, traj.table(k)[z_idx], traj.table(k)[x_idx]) for k in range(traj.horizon)))


def _mixed(g: StaticGame, i: int, z_idx: int, x_idx: int) -> Fraction:
    return g.tables[i][g.deviations(i, x_idx)[g.profiles.profile(z_idx)[i]]]


def truncated_h(rg: RepeatedGame, i: int, x: Profile, K: int) -> Fraction:
    """``Σ_{k=0}^{K} ρ^k f_i(Π_k x)`` by explicit composition (oracle)."""
    g = rg.game
    idx = g.profiles.index(x)
    total = Fraction(0)
    for k in range(K + 1):
        total += rg.rho ** k * g.tables[i][idx]
        idx = rg.schedule.operator(k + 1).table[idx]
    return total


def truncated_H(rg: RepeatedGame, i: int, z: Profile, x: Profile, K: int) -> Fraction:
    g = rg.game
    zi, xi = g.profiles.index(z), g.profiles.index(x)
    total = Fraction(0)
    for k in range(K + 1):
        total += rg.rho ** k * _mixed(g, i, zi, xi)
        op = rg.schedule.operator(k + 1)
        zi, xi = op.table[zi], op.table[xi]
    return total


def _H_rows(rg: RepeatedGame, i: int, x_idx: int) -> list[Fraction]:
    g = rg.game
    traj = rg.trajectory
    w = rg.weights
    sp = g.profiles
    out = []
    for z in range(sp.size):
        total = Fraction(0)
        for k in range(traj.horizon):
            tab = traj.table(k)
            total += w[k] * g.tables[i][g.deviations(i, tab[x_idx])[sp.profile(tab[z])[i]]]
        out.append(total)
    return out


def is_repeated_ne(rg: RepeatedGame, x: Profile) -> Check:
    """``H_i(z, x) <= H_i(x, x)`` for every player and every ``z``.

    Witness ``(i, z)`` with ``z`` the most profitable deviation.
    """
    g = rg.game
    sp = g.profiles
    x_idx = sp.index(g.check_profile(x))
    for i in range(g.n):
        row = _H_rows(rg, i, x_idx)
        base = row[x_idx]
        best = max(range(sp.size), key=lambda z: (row[z], -z))
        if row[best] > base:
            return Check(False, witness=(i, sp.profile(best)))
    return Check(True)


def repeated_ne_set(rg: RepeatedGame, cap: int = DEFAULT_CAPS.profiles) -> list[Profile]:
    sp = rg.game.profiles
    if sp.size > cap:
        raise CapExceeded("profile space", sp.size, cap)
    return [p for p in sp.profiles() if is_repeated_ne(rg, p)]


@dataclass
class Proposition1Report:
    inf_split_ne: list[Profile]
    repeated_ne: list[Profile]
    missing: list[Profile]
    partial: bool

    @property
    def holds(self) -> bool:
        return not self.missing


def check_proposition1(rg: RepeatedGame, cap: int = DEFAULT_CAPS.profiles) -> Proposition1Report:
    inf = inf_split_ne_set(rg, cap=cap)
    rep = repeated_ne_set(rg, cap=cap)
    got = set(rep)
    return Proposition1Report(inf, rep, [p for p in inf if p not in got], not rg.trajectory.exact)


@dataclass
class InfSplitReport(ExistenceReport):
    """Theorem 2 pipeline result; ψ takes the place of π."""

    partial: bool = False
    notes: list[str] = field(default_factory=lambda: [A2_NOTE, SUFFICIENCY_NOTE])


def _schedule_increasing(schedule: OperatorSchedule) -> Check:
    for k, op in enumerate(schedule.operators, start=1):
        res = is_increasing(op)
        if not res:
            where = ("prefix", k - 1) if k <= len(schedule.prefix) else ("cycle", k - 1 - len(schedule.prefix))
            return Check(False, witness=where + res.witness)
    return Check(True)


def check_theorem2(rg: RepeatedGame, caps: Caps = DEFAULT_CAPS) -> InfSplitReport:
    g = rg.game
    sp = g.profiles
    if sp.size > caps.profiles:
        raise CapExceeded("profile space", sp.size, caps.profiles)
    masks = [psi_mask(rg, x) for x in range(sp.size)]
    report = InfSplitReport(
        condition_a=order_positivity_all(g, caps.profiles),
        condition_b=values_condition(sp, masks, caps.chain),
        condition_c=_schedule_increasing(rg.schedule),
        condition_d=witness_condition(sp, masks),
        split_ne=inf_split_ne_set(rg, cap=caps.profiles),
        partial=not rg.trajectory.exact,
    )
    conclude(report, sp, masks, report.split_ne, caps)
    return report


def gamma_psi(rg: RepeatedGame) -> SetValuedMap:
    sp = rg.game.profiles
    return SetValuedMap(sp, [list(iter_bits(psi_mask(rg, x))) for x in range(sp.size)])
