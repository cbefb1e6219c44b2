"""Static n-person games on finite posets with exact rational utilities.

Players are numbered ``0..n-1`` in this API.  A profile is a tuple holding
one element index per player; ``x[-i]`` style opponent profiles are the same
tuple with coordinate ``i`` dropped.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Callable, Mapping, Sequence

from .common import DEFAULT_PROFILE_CAP, CapExceeded, Check, RationalLike, parse_rational
from .poset import FinitePoset, PosetError, ProductPoset

Profile = tuple[int, ...]
UtilityVector = tuple[Fraction, ...]


class GameError(ValueError):
    pass


class StaticGame:
    """Players, strategy posets and one total utility table per player.

    ``tables[i][k]`` is player ``i``'s utility at the profile with index ``k``
    in :attr:`profiles`.
    """

    def __init__(self, posets: Sequence[FinitePoset], tables: Sequence[Sequence[RationalLike]]):
        if len(posets) < 2:
            raise GameError(f"a game needs at least 2 players, got {len(posets)}")
        self.posets = tuple(posets)
        self.profiles = ProductPoset(self.posets)
        if len(tables) != len(self.posets):
            raise GameError("one utility table per player is required")
        out = []
        for i, table in enumerate(tables):
            if len(table) != self.profiles.size:
                raise GameError(f"utility table of player {i} is not total")
            out.append(tuple(parse_rational(v) for v in table))
        self.tables = tuple(out)

    @property
    def n(self) -> int:
        return len(self.posets)

    @classmethod
    def from_function(
        cls, posets: Sequence[FinitePoset], fn: Callable[[Profile], Sequence[RationalLike]]
    ) -> "StaticGame":
        space = ProductPoset(posets)
        rows = [fn(p) for p in space.profiles()]
        tables = [[row[i] for row in rows] for i in range(len(posets))]
        return cls(posets, tables)

    @classmethod
    def from_mappings(
        cls, posets: Sequence[FinitePoset], payoffs: Mapping[Profile, Sequence[RationalLike]]
    ) -> "StaticGame":
        space = ProductPoset(posets)
        missing = [p for p in space.profiles() if p not in payoffs]
        if missing:
            raise GameError(f"utility table is not total; missing profile {missing[0]}")
        return cls.from_function(posets, lambda p: payoffs[p])

    def f(self, i: int, x: Profile) -> Fraction:
        return self.tables[i][self.profiles.index(x)]

    def f_at(self, i: int, idx: int) -> Fraction:
        return self.tables[i][idx]

    def check_profile(self, x: Sequence[int]) -> Profile:
        x = tuple(x)
        try:
            self.profiles.index(x)
        except PosetError as exc:
            raise GameError(str(exc)) from None
        return x

    @cached_property
    def _deviation_index(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """``[i][k]`` lists indices of ``(z_i, x_{-i})`` over ``z_i ∈ S_i``."""
        sp = self.profiles
        out = []
        for i, n_i in enumerate(sp.shape):
            s = sp.strides[i]
            row = []
            for idx, p in enumerate(sp.profiles()):
                base = idx - p[i] * s
                row.append(tuple(base + z * s for z in range(n_i)))
            out.append(tuple(row))
        return tuple(out)

    def deviations(self, i: int, idx: int) -> tuple[int, ...]:
        return self._deviation_index[i][idx]

    def mixed_index(self, i: int, z_idx: int, x_idx: int) -> int:
        """Index of ``(z_i, x_{-i})``."""
        return self._deviation_index[i][x_idx][self.profiles.profile(z_idx)[i]]


def replace(game: StaticGame, x: Profile, i: int, z_i: int) -> Profile:
    x = game.check_profile(x)
    if not 0 <= i < game.n:
        raise GameError(f"no player {i}")
    game.posets[i].check_element(z_i)
    return x[:i] + (z_i,) + x[i + 1:]


def utility_vector(game: StaticGame, x: Profile) -> UtilityVector:
    idx = game.profiles.index(game.check_profile(x))
    return tuple(t[idx] for t in game.tables)


def assoc_vector(game: StaticGame, z: Profile, x: Profile) -> UtilityVector:
    """Component ``i`` is ``f_i(z_i, x_{-i})``."""
    z = game.check_profile(z)
    x = game.check_profile(x)
    return tuple(game.f(i, x[:i] + (z[i],) + x[i + 1:]) for i in range(game.n))


def leq_n(u: Sequence[Fraction], v: Sequence[Fraction]) -> bool:
    if len(u) != len(v):
        raise GameError("utility vectors of different length")
    return all(a <= b for a, b in zip(u, v))


def _best_violation(values: Sequence[Fraction], base: Fraction) -> int | None:
    """Position of the largest entry exceeding ``base`` (lowest on ties)."""
    best = None
    for z, v in enumerate(values):
        if v > base and (best is None or v > values[best]):
            best = z
    return best


def is_nash(game: StaticGame, x: Profile) -> Check:
    """Per-player deviation test.

    When it fails, the witness ``(i, z_i)`` names the first player with a
    profitable deviation and that player's most profitable deviation.
    """
    idx = game.profiles.index(game.check_profile(x))
    for i in range(game.n):
        table = game.tables[i]
        values = [table[d] for d in game.deviations(i, idx)]
        z = _best_violation(values, table[idx])
        if z is not None:
            return Check(False, witness=(i, z))
    return Check(True)


def is_nash_vector_form(game: StaticGame, x: Profile) -> bool:
    """``F(z, x) <=^n F(x, x)`` for every ``z`` in the profile space."""
    x = game.check_profile(x)
    fx = utility_vector(game, x)
    return all(leq_n(assoc_vector(game, z, x), fx) for z in game.profiles.profiles())


def nash_set(game: StaticGame, cap: int = DEFAULT_PROFILE_CAP) -> list[Profile]:
    if game.profiles.size > cap:
        raise CapExceeded("profile space", game.profiles.size, cap)
    out = []
    for idx, p in enumerate(game.profiles.profiles()):
        if all(
            max(game.tables[i][d] for d in game.deviations(i, idx)) <= game.tables[i][idx]
            for i in range(game.n)
        ):
            out.append(p)
    return out


def _opponent_rows(game: StaticGame, i: int):
    """Map each opponent profile to player ``i``'s utilities over ``S_i``."""
    sp = game.profiles
    rows = {}
    for idx, p in enumerate(sp.profiles()):
        if p[i] == 0:
            rows[p[:i] + p[i + 1:]] = [game.tables[i][d] for d in game.deviations(i, idx)]
    return rows


def _order_kept(lo: Sequence[Fraction], hi: Sequence[Fraction]):
    """First ``(z, t)`` with ``lo[z] <= lo[t]`` but ``hi[z] > hi[t]``."""
    m = len(lo)
    for z in range(m):
        for t in range(m):
            if lo[z] <= lo[t] and hi[z] > hi[t]:
                return z, t
    return None


def is_order_positive(game: StaticGame, i: int, cap: int = DEFAULT_PROFILE_CAP) -> Check:
    """Player ``i``'s preferences over own strategies persist upward in opponents.

    For opponent profiles ``x_{-i} <= y_{-i}`` and all ``z_i, t_i``:
    ``f_i(z_i, x_{-i}) <= f_i(t_i, x_{-i})`` implies the same at ``y_{-i}``.
    The implication composes along chains, so only cover pairs of the opponent
    poset are scanned.  Witness: ``(x_{-i}, y_{-i}, z_i, t_i)``.
    """
    if game.profiles.size > cap:
        raise CapExceeded("profile space", game.profiles.size, cap)
    opp = game.profiles.omit(i)
    rows = _opponent_rows(game, i)
    for a, b in opp.covers():
        xa, xb = opp.profile(a), opp.profile(b)
        hit = _order_kept(rows[xa], rows[xb])
        if hit is not None:
            return Check(False, witness=(xa, xb, hit[0], hit[1]))
    return Check(True)


def is_order_positive_bruteforce(game: StaticGame, i: int) -> Check:
    """Exhaustive scan over every comparable opponent pair (oracle)."""
    opp = game.profiles.omit(i)
    rows = _opponent_rows(game, i)
    for a in range(opp.size):
        for b in range(opp.size):
            if opp.leq(a, b):
                xa, xb = opp.profile(a), opp.profile(b)
                hit = _order_kept(rows[xa], rows[xb])
                if hit is not None:
                    return Check(False, witness=(xa, xb, hit[0], hit[1]))
    return Check(True)


def bound_M(game: StaticGame) -> Fraction:
    return max(abs(v) for t in game.tables for v in t)
