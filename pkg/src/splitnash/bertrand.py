"""Repeated extended Bertrand duopoly on rational price grids.

Two firms with unit costs ``c1 <= c2`` name prices.  Demand is split by the
quality ratio ``λ = c1/c2``: firm 1 takes the market when ``p1 < λ p2``,
firm 2 when ``p1 > λ p2``, and on a tie the shares are ``c1/(c1+c2)`` and
``c2/(c1+c2)``.  A firm at or above its price cap sells nothing.  Between
plays prices move by column-stochastic 2x2 matrices
``[[α, 1-β], [1-α, β]]``.

Firms are numbered 1 and 2 here, as in the model; the generic game API
underneath numbers players from 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .common import DEFAULT_CAPS, DEFAULT_CYCLE_CAP, Caps, RationalLike, parse_rational
from .dual import ProfileOperator
from .game import StaticGame, nash_set
from .poset import FinitePoset
from .repeated import HorizonCheck, OperatorSchedule, RepeatedGame, h, inf_split_ne_set, is_inf_split_ne

Price = Fraction
PricePair = tuple[Fraction, Fraction]
Matrix = tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]


class ModelError(ValueError):
    pass


class OffGridError(ValueError):
    """A transform maps some grid profile outside the grid."""

    def __init__(self, transform: "PriceTransform", p1: Fraction, p2: Fraction, image: PricePair):
        super().__init__(
            f"transform (alpha={transform.alpha}, beta={transform.beta}) maps ({p1}, {p2}) "
            f"to ({image[0]}, {image[1]}), which is off the price grid; refine or close the grid"
        )
        self.transform = transform
        self.point = (p1, p2)
        self.image = image


def uniform_grid(cap: RationalLike, step: RationalLike) -> tuple[Fraction, ...]:
    cap, step = parse_rational(cap), parse_rational(step)
    if step <= 0:
        raise ModelError("grid step must be positive")
    n = int(cap / step)
    return tuple(step * k for k in range(n + 1))


def linear_demand(d0: Fraction, d1: Fraction, d2: Fraction) -> Callable[[Fraction, Fraction], Fraction]:
    def demand_fn(p1: Fraction, p2: Fraction) -> Fraction:
        return max(Fraction(0), d0 - d1 * p1 - d2 * p2)

    return demand_fn


@dataclass(frozen=True)
class BertrandModel:
    c1: Fraction
    c2: Fraction
    p_bar1: Fraction
    p_bar2: Fraction
    grid1: tuple[Fraction, ...]
    grid2: tuple[Fraction, ...]
    demand_coeffs: tuple[Fraction, Fraction, Fraction] = (Fraction(12), Fraction(1), Fraction(1))
    demand_fn: Callable[[Fraction, Fraction], Fraction] | None = field(default=None, compare=False)

    def __post_init__(self):
        conv = lambda v: parse_rational(v)
        for name in ("c1", "c2", "p_bar1", "p_bar2"):
            object.__setattr__(self, name, conv(getattr(self, name)))
        object.__setattr__(self, "demand_coeffs", tuple(conv(v) for v in self.demand_coeffs))
        object.__setattr__(self, "grid1", tuple(sorted(set(conv(v) for v in self.grid1))))
        object.__setattr__(self, "grid2", tuple(sorted(set(conv(v) for v in self.grid2))))
        if len(self.demand_coeffs) != 3:
            raise ModelError("linear demand needs three coefficients (d0, d1, d2)")
        if not 0 < self.c1 <= self.c2:
            raise ModelError(f"costs must satisfy 0 < c1 <= c2, got ({self.c1}, {self.c2})")
        if self.p_bar1 <= self.c1 or self.p_bar2 <= self.c2:
            raise ModelError("price caps must exceed costs")
        if self.demand_fn is None and (self.demand_coeffs[1] <= 0 or self.demand_coeffs[2] <= 0):
            raise ModelError("linear demand slopes must be positive")
        for grid, c, cap, j in ((self.grid1, self.c1, self.p_bar1, 1), (self.grid2, self.c2, self.p_bar2, 2)):
            if c not in grid:
                raise ModelError(f"grid {j} must contain the cost {c}")
            if grid[0] < 0 or grid[-1] > cap:
                raise ModelError(f"grid {j} must lie in [0, {cap}]")
        dc = demand(self, self.c1, self.c2)
        if not dc > 0:
            raise ModelError(f"demand at costs must be strictly positive, got {dc}")

    @classmethod
    def uniform(cls, c1, c2, p_bar1, p_bar2, step, demand_coeffs=(12, 1, 1), demand_fn=None) -> "BertrandModel":
        return cls(
            c1=parse_rational(c1),
            c2=parse_rational(c2),
            p_bar1=parse_rational(p_bar1),
            p_bar2=parse_rational(p_bar2),
            grid1=uniform_grid(p_bar1, step),
            grid2=uniform_grid(p_bar2, step),
            demand_coeffs=tuple(parse_rational(v) for v in demand_coeffs),
            demand_fn=demand_fn,
        )

    @property
    def lam(self) -> Fraction:
        return self.c1 / self.c2

    @property
    def costs(self) -> PricePair:
        return (self.c1, self.c2)

    def grid(self, firm: int) -> tuple[Fraction, ...]:
        return self.grid1 if firm == 1 else self.grid2

    def grid_profile(self, prices: Sequence[Fraction]) -> tuple[int, int] | None:
        try:
            return (self.grid1.index(prices[0]), self.grid2.index(prices[1]))
        except ValueError:
            return None

    def prices_of(self, profile: Sequence[int]) -> PricePair:
        return (self.grid1[profile[0]], self.grid2[profile[1]])


def _check_prices(p1: Fraction, p2: Fraction) -> None:
    if p1 < 0 or p2 < 0:
        raise ModelError(f"negative price in ({p1}, {p2})")


def demand(model: BertrandModel, p1: RationalLike, p2: RationalLike) -> Fraction:
    p1, p2 = parse_rational(p1), parse_rational(p2)
    _check_prices(p1, p2)
    if model.demand_fn is not None:
        return parse_rational(model.demand_fn(p1, p2))
    d0, d1, d2 = model.demand_coeffs
    return max(Fraction(0), d0 - d1 * p1 - d2 * p2)


def shares(model: BertrandModel, p1: Fraction, p2: Fraction) -> tuple[Fraction, Fraction]:
    threshold = model.lam * p2
    if p1 > threshold:
        return Fraction(0), Fraction(1)
    if p1 == threshold:
        total = model.c1 + model.c2
        return model.c1 / total, model.c2 / total
    return Fraction(1), Fraction(0)


def sales(model: BertrandModel, p1: RationalLike, p2: RationalLike) -> tuple[Fraction, Fraction]:
    """Sales of both firms; the cap rule overrides the share split."""
    p1, p2 = parse_rational(p1), parse_rational(p2)
    dem = demand(model, p1, p2)
    s1, s2 = shares(model, p1, p2)
    d1 = Fraction(0) if p1 >= model.p_bar1 else s1 * dem
    d2 = Fraction(0) if p2 >= model.p_bar2 else s2 * dem
    return d1, d2


def profit(model: BertrandModel, firm: int, p1: RationalLike, p2: RationalLike) -> Fraction:
    p1, p2 = parse_rational(p1), parse_rational(p2)
    d1, d2 = sales(model, p1, p2)
    if firm == 1:
        return (p1 - model.c1) * d1
    if firm == 2:
        return (p2 - model.c2) * d2
    raise ModelError(f"no firm {firm}")


@dataclass(frozen=True)
class PriceTransform:
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        a, b = parse_rational(self.alpha), parse_rational(self.beta)
        if not (0 <= a <= 1 and 0 <= b <= 1):
            raise ModelError(f"alpha and beta must lie in [0, 1], got ({a}, {b})")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @property
    def matrix(self) -> Matrix:
        a, b = self.alpha, self.beta
        return ((a, 1 - b), (1 - a, b))

    @property
    def is_identity(self) -> bool:
        return self.alpha == 1 and self.beta == 1

    def __call__(self, p1: Fraction, p2: Fraction) -> PricePair:
        return _apply(self.matrix, (p1, p2))


IDENTITY = PriceTransform(Fraction(1), Fraction(1))
SWAP = PriceTransform(Fraction(0), Fraction(0))
AVERAGE = PriceTransform(Fraction(1, 2), Fraction(1, 2))


def _apply(m: Matrix, p: PricePair) -> PricePair:
    return (m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1])


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    return (
        (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
        (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
    )


@dataclass(frozen=True)
class TransformStep:
    p1: Fraction
    p2: Fraction
    p1_nondecreasing: bool
    p2_nonincreasing: bool


def apply_transform(t: PriceTransform, p1: RationalLike, p2: RationalLike) -> TransformStep:
    """Apply one transform and report whether p1 rose and p2 fell (not assumed)."""
    p1, p2 = parse_rational(p1), parse_rational(p2)
    q1, q2 = t(p1, p2)
    return TransformStep(q1, q2, q1 >= p1, q2 <= p2)


@dataclass(frozen=True)
class PricePath:
    points: tuple[PricePair, ...]
    monotone_flags: tuple[tuple[bool, bool], ...]


def price_path(transforms: Sequence[PriceTransform], start: PricePair) -> PricePath:
    points = [tuple(parse_rational(v) for v in start)]
    flags = []
    for t in transforms:
        step = apply_transform(t, *points[-1])
        points.append((step.p1, step.p2))
        flags.append((step.p1_nondecreasing, step.p2_nonincreasing))
    return PricePath(tuple(points), tuple(flags))


@dataclass(frozen=True)
class TransformSchedule:
    """Prefix then repeating cycle of price transforms (``A_1, A_2, ...``)."""

    prefix: tuple[PriceTransform, ...] = ()
    cycle: tuple[PriceTransform, ...] = (IDENTITY,)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ModelError("transform cycle must be nonempty")

    @property
    def transforms(self) -> tuple[PriceTransform, ...]:
        return self.prefix + self.cycle

    @property
    def is_identity(self) -> bool:
        return all(t.is_identity for t in self.transforms)

    def transform(self, k: int) -> PriceTransform:
        m = len(self.prefix)
        return self.prefix[k - 1] if k <= m else self.cycle[(k - m - 1) % len(self.cycle)]

    def phase(self, k: int) -> int:
        m = len(self.prefix)
        return k if k < m else m + (k - m) % len(self.cycle)


def static_game(model: BertrandModel) -> StaticGame:
    """The grid game: price chains for both firms, profits as utilities."""
    posets = [FinitePoset.chain([str(p) for p in model.grid1]), FinitePoset.chain([str(p) for p in model.grid2])]

    def payoff(profile):
        p1, p2 = model.prices_of(profile)
        return (profit(model, 1, p1, p2), profit(model, 2, p1, p2))

    return StaticGame.from_function(posets, payoff)


def _operator(model: BertrandModel, game: StaticGame, t: PriceTransform) -> ProfileOperator:
    sp = game.profiles
    table = []
    for p in sp.profiles():
        p1, p2 = model.prices_of(p)
        image = t(p1, p2)
        target = model.grid_profile(image)
        if target is None:
            raise OffGridError(t, p1, p2, image)
        table.append(sp.index(target))
    return ProfileOperator(sp, table)


def schedule_from_transforms(model: BertrandModel, schedule: TransformSchedule, game: StaticGame | None = None) -> OperatorSchedule:
    game = game or static_game(model)
    return OperatorSchedule(
        [_operator(model, game, t) for t in schedule.prefix],
        [_operator(model, game, t) for t in schedule.cycle],
    )


class MatrixTrajectory:
    """``Π_k`` as exact 2x2 matrices, with (phase, matrix) cycle detection.

    Works off the grid: trajectory points are exact rationals whether or not
    they land on grid prices.
    """

    def __init__(self, schedule: TransformSchedule, cap: int = DEFAULT_CYCLE_CAP):
        one, zero = Fraction(1), Fraction(0)
        self.mats: list[Matrix] = [((one, zero), (zero, one))]
        self.k0: int | None = None
        self.q: int | None = None
        seen = {(schedule.phase(0), self.mats[0]): 0}
        k = 0
        while k < cap:
            k += 1
            self.mats.append(_matmul(schedule.transform(k).matrix, self.mats[-1]))
            state = (schedule.phase(k), self.mats[-1])
            if state in seen:
                self.k0, self.q = seen[state], k - seen[state]
                self.mats.pop()
                break
            seen[state] = k

    @property
    def exact(self) -> bool:
        return self.k0 is not None

    @property
    def horizon(self) -> int:
        return len(self.mats)


@dataclass(frozen=True)
class PeriodWitness:
    """Violation of the per-period equilibrium inequality at step ``k``.

    ``deviation`` is the first-period grid profile ``z``; ``deviation_price``
    is ``(Π_k z)_firm`` played against the path point's other price.
    """

    k: int
    firm: int
    deviation: PricePair
    deviation_price: Fraction
    path_point: PricePair
    deviation_profit: Fraction
    path_profit: Fraction

    def replay(self, model: BertrandModel) -> bool:
        """Recompute both sides from scratch; True iff the violation is real."""
        q = list(self.path_point)
        base = profit(model, self.firm, *q)
        q[self.firm - 1] = self.deviation_price
        dev = profit(model, self.firm, *q)
        return dev == self.deviation_profit and base == self.path_profit and dev > base


class _ExactEvaluator:
    def __init__(self, model: BertrandModel, schedule: TransformSchedule, cap: int):
        self.model = model
        self.traj = MatrixTrajectory(schedule, cap=cap)
        grid_pts = [(a, b) for a in model.grid1 for b in model.grid2]
        self.devs = []
        for m in self.traj.mats:
            best = {}
            for z in grid_pts:
                img = _apply(m, z)
                for firm in (1, 2):
                    best.setdefault((firm, img[firm - 1]), z)
            self.devs.append(best)
        self._memo: dict = {}

    def best_deviation(self, k: int, firm: int, other: Fraction):
        key = (k, firm, other)
        if key not in self._memo:
            best = None
            for (f, price), z in self.devs[k].items():
                if f != firm:
                    continue
                pair = (price, other) if firm == 1 else (other, price)
                v = profit(self.model, firm, *pair)
                if best is None or v > best[0] or (v == best[0] and z < best[2]):
                    best = (v, price, z)
            self._memo[key] = best
        return self._memo[key]

    def check(self, x: PricePair) -> HorizonCheck:
        for k, m in enumerate(self.traj.mats):
            y = _apply(m, x)
            for firm in (1, 2):
                base = profit(self.model, firm, *y)
                v, price, z = self.best_deviation(k, firm, y[2 - firm])
                if v > base:
                    w = PeriodWitness(k, firm, z, price, y, v, base)
                    return HorizonCheck(False, w, not self.traj.exact, self.traj.horizon)
        return HorizonCheck(True, None, not self.traj.exact, self.traj.horizon)


def exact_inf_split_check(
    model: BertrandModel, schedule: TransformSchedule, x: PricePair, cap: int = DEFAULT_CYCLE_CAP
) -> HorizonCheck:
    """Decide the per-period inequality along ``Π_k x`` by exact arithmetic.

    Deviations ``z`` range over grid profiles; their images need not be grid
    points.  The witness is an :class:`PeriodWitness` for the first violating
    ``(k, firm)``, using that firm's most profitable deviation at step ``k``.
    """
    x = tuple(parse_rational(v) for v in x)
    return _ExactEvaluator(model, schedule, cap).check(x)


def exact_inf_split_set(model: BertrandModel, schedule: TransformSchedule, cap: int = DEFAULT_CYCLE_CAP) -> list[PricePair]:
    ev = _ExactEvaluator(model, schedule, cap)
    return [(a, b) for a in model.grid1 for b in model.grid2 if ev.check((a, b))]


def period_violations(model: BertrandModel, schedule: TransformSchedule, x: PricePair, k: int, firm: int) -> list[PeriodWitness]:
    """Every grid deviation that beats the path at step ``k`` for ``firm``."""
    traj = MatrixTrajectory(schedule, cap=max(k + 1, 1))
    if k < traj.horizon:
        m = traj.mats[k]
    else:
        if not traj.exact:
            raise ModelError(f"step {k} beyond the computed horizon")
        m = traj.mats[traj.k0 + (k - traj.k0) % traj.q]
    x = tuple(parse_rational(v) for v in x)
    y = _apply(m, x)
    base = profit(model, firm, *y)
    out = []
    for a in model.grid1:
        for b in model.grid2:
            price = _apply(m, (a, b))[firm - 1]
            pair = (price, y[1]) if firm == 1 else (y[0], price)
            v = profit(model, firm, *pair)
            if v > base:
                out.append(PeriodWitness(k, firm, (a, b), price, y, v, base))
    return out


def grid_distance(model: BertrandModel, prices: PricePair) -> tuple[int, int]:
    """Grid-index distance of each coordinate from the cost vector."""
    return (
        abs(model.grid1.index(prices[0]) - model.grid1.index(model.c1)),
        abs(model.grid2.index(prices[1]) - model.grid2.index(model.c2)),
    )


@dataclass
class Claim:
    name: str
    asserted: bool
    holds: bool
    detail: str = ""


@dataclass
class Theorem3Report:
    case: str
    candidate: PricePair
    identity_schedule: bool
    on_grid: bool
    off_grid_reason: str | None
    member: HorizonCheck
    members: list[PricePair] | None
    extra_equilibria: list[tuple[PricePair, tuple[int, int]]]
    table_crosscheck: bool | None
    candidate_path: PricePath
    claims: list[Claim] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.claims if c.asserted)


EXACT_SET_LIMIT = 400


def verify_theorem3(
    model: BertrandModel, schedule: TransformSchedule = TransformSchedule(), caps: Caps = DEFAULT_CAPS
) -> Theorem3Report:
    """Check the infinitely split equilibrium claims for the cost profile.

    Membership of ``(c1, c2)`` is decided exactly.  When the schedule keeps
    the grid closed, the generic table machinery computes the full grid set
    and must agree with the exact evaluator; otherwise the exact evaluator
    computes the grid set when the grid is small enough.
    """
    candidate = model.costs
    member = exact_inf_split_check(model, schedule, candidate, cap=caps.cycle)
    game = static_game(model)
    on_grid, reason, members, cross = True, None, None, None
    try:
        op_schedule = schedule_from_transforms(model, schedule, game)
    except OffGridError as exc:
        on_grid, reason = False, str(exc)
    if on_grid:
        rg = RepeatedGame(game, op_schedule, Fraction(1, 2), cycle_cap=caps.cycle)
        grid_set = inf_split_ne_set(rg, cap=caps.profiles)
        members = [model.prices_of(p) for p in grid_set]
        table_member = is_inf_split_ne(rg, model.grid_profile(candidate))
        cross = bool(table_member) == bool(member)
    elif len(model.grid1) * len(model.grid2) <= EXACT_SET_LIMIT:
        members = exact_inf_split_set(model, schedule, cap=caps.cycle)
    extra = [(p, grid_distance(model, p)) for p in (members or []) if p != candidate]
    steps = max(1, member.horizon - 1)
    report = Theorem3Report(
        case="i" if model.c1 == model.c2 else "ii",
        candidate=candidate,
        identity_schedule=schedule.is_identity,
        on_grid=on_grid,
        off_grid_reason=reason,
        member=member,
        members=members,
        extra_equilibria=extra,
        table_crosscheck=cross,
        candidate_path=price_path([schedule.transform(k) for k in range(1, steps + 1)], candidate),
    )
    if model.c1 == model.c2:
        report.claims.append(Claim("(c, c) is an infinitely split equilibrium", True, bool(member)))
    elif schedule.is_identity:
        report.claims.append(Claim("(c1, c2) is an infinitely split equilibrium under identity", True, bool(member)))
    else:
        detail = "violation witness found" if not member else "no violation found on this grid"
        report.claims.append(Claim("(c1, c2) fails under a non-identity schedule", False, not member, detail))
    if cross is not None:
        report.claims.append(Claim("table and exact evaluators agree", True, cross))
    if extra:
        report.notes.append(f"{len(extra)} additional grid equilibria (discretization artifacts) reported")
    if member.partial:
        report.notes.append(f"partial: verified for k < {member.horizon}")
    return report


def verify_static(model: BertrandModel, caps: Caps = DEFAULT_CAPS) -> dict:
    """Grid Nash set of the one-shot game and the cost-profile membership."""
    game = static_game(model)
    ne = [model.prices_of(p) for p in nash_set(game, cap=caps.profiles)]
    c = model.costs
    deviator_max = max(
        max(profit(model, 1, p, c[1]) for p in model.grid1),
        max(profit(model, 2, c[0], p) for p in model.grid2),
    )
    return {
        "nash_set": ne,
        "cost_profile_is_nash": c in ne,
        "max_unilateral_deviation_profit": deviator_max,
        "extra_equilibria": [(p, grid_distance(model, p)) for p in ne if p != c],
    }


def corollary4(model: BertrandModel, rho: RationalLike) -> tuple[Fraction, Fraction]:
    """Discounted profits of both firms at ``(c1, c2)`` under the identity schedule."""
    game = static_game(model)
    rg = RepeatedGame(game, OperatorSchedule.identity(game.profiles), rho)
    x = model.grid_profile(model.costs)
    return h(rg, 0, x), h(rg, 1, x)
