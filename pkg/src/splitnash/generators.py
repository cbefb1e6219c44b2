"""Random small instances for property campaigns.

All generators take a ``random.Random`` so campaigns are reproducible from a
seed.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .common import iter_bits
from .dual import DualGame, ProfileOperator
from .fixedpoint import SetValuedMap
from .game import StaticGame
from .poset import FinitePoset, Poset, ProductPoset
from .repeated import OperatorSchedule, RepeatedGame


def random_poset(rng: random.Random, n: int, kind: str | None = None) -> FinitePoset:
    kind = kind or rng.choice(["chain", "antichain", "dag", "dag"])
    labels = [f"s{i}" for i in range(n)]
    if kind == "chain":
        return FinitePoset.chain(labels)
    if kind == "antichain":
        return FinitePoset.antichain(labels)
    p = rng.uniform(0.2, 0.7)
    covers = [(labels[a], labels[b]) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
    return FinitePoset.from_covers(labels, covers)


def random_posets(rng: random.Random, max_players: int = 3, max_size: int = 4) -> list[FinitePoset]:
    n = rng.randint(2, max_players)
    return [random_poset(rng, rng.randint(1, max_size)) for _ in range(n)]


def random_game(rng: random.Random, posets: Sequence[FinitePoset], values: Sequence[int] = range(-2, 3)) -> StaticGame:
    """Independent small-integer utilities; the narrow range makes ties common."""
    space = ProductPoset(posets)
    tables = [[Fraction(rng.choice(values)) for _ in range(space.size)] for _ in posets]
    return StaticGame(posets, tables)


def order_positive_game(rng: random.Random, posets: Sequence[FinitePoset]) -> StaticGame:
    """``f_i = g_i(z_i) * w_i(x_{-i}) + b_i(x_{-i})`` with ``w_i > 0``.

    Positive rescaling plus an opponent-only shift preserves each player's
    ranking of own strategies, so every player is order-positive.
    """
    n = len(posets)
    g = [[rng.randint(-2, 2) for _ in range(p.size)] for p in posets]
    w_tab: list[dict] = [{} for _ in range(n)]
    b_tab: list[dict] = [{} for _ in range(n)]

    def payoff(profile):
        out = []
        for i in range(n):
            opp = profile[:i] + profile[i + 1:]
            w = w_tab[i].setdefault(opp, rng.randint(1, 3))
            b = b_tab[i].setdefault(opp, rng.randint(-2, 2))
            out.append(Fraction(g[i][profile[i]] * w + b))
        return out

    return StaticGame.from_function(posets, payoff)


def random_operator(rng: random.Random, space: ProductPoset) -> ProfileOperator:
    return ProfileOperator(space, [rng.randrange(space.size) for _ in range(space.size)])


def random_monotone_operator(rng: random.Random, space: Poset, attempts: int = 20) -> ProfileOperator | None:
    """Assign images along a linear extension, each above all earlier images
    of elements below it.  Returns None if every attempt hits a poset with no
    common upper bound."""
    for _ in range(attempts):
        images = [None] * space.size
        ok = True
        for x in space.linear_extension:
            allowed = space.full_mask
            for y in iter_bits(space.down_mask(x) & ~(1 << x)):
                allowed &= space.up_mask(images[y])
            cands = list(iter_bits(allowed))
            if not cands:
                ok = False
                break
            if rng.random() < 0.5:
                mins = [c for c in cands if not any(space.lt(d, c) for d in cands)]
                images[x] = rng.choice(mins)
            else:
                images[x] = rng.choice(cands)
        if ok:
            return ProfileOperator(space, images)
    return None


def random_increasing_upward_map(rng: random.Random, poset: Poset) -> SetValuedMap:
    """Either subset-growing or merely dominated-upward values."""
    subset_mode = rng.random() < 0.5
    values = [0] * poset.size
    for y in poset.linear_extension:
        m = 0
        for _ in range(rng.randint(1, 2)):
            m |= 1 << rng.randrange(poset.size)
        for x in iter_bits(poset.down_mask(y) & ~(1 << y)):
            if subset_mode:
                m |= values[x]
                continue
            for u in iter_bits(values[x]):
                if not poset.up_mask(u) & m:
                    m |= 1 << rng.choice(list(iter_bits(poset.up_mask(u))))
        values[y] = m
    return SetValuedMap(poset, [list(iter_bits(v)) for v in values])


def random_set_valued_map(rng: random.Random, poset: Poset) -> SetValuedMap:
    return SetValuedMap(poset, [rng.sample(range(poset.size), rng.randint(1, poset.size)) for _ in range(poset.size)])


def random_schedule(rng: random.Random, space: ProductPoset, monotone: bool = False) -> OperatorSchedule | None:
    def op():
        if rng.random() < 0.15:
            return ProfileOperator.identity(space)
        return random_monotone_operator(rng, space) if monotone else random_operator(rng, space)

    prefix = [op() for _ in range(rng.randint(0, 2))]
    cycle = [op() for _ in range(rng.randint(1, 2))]
    if any(o is None for o in prefix + cycle):
        return None
    return OperatorSchedule(prefix, cycle)


def random_rho(rng: random.Random) -> Fraction:
    q = rng.randint(2, 9)
    return Fraction(rng.randint(1, q - 1), q)


def random_dual(rng: random.Random, monotone: bool = True, order_positive: bool = False) -> DualGame | None:
    posets = random_posets(rng)
    game = order_positive_game(rng, posets) if order_positive else random_game(rng, posets)
    op = random_monotone_operator(rng, game.profiles) if monotone else random_operator(rng, game.profiles)
    return None if op is None else DualGame(game, op)


def random_repeated(rng: random.Random, monotone: bool = False, order_positive: bool = False) -> RepeatedGame | None:
    posets = random_posets(rng)
    game = order_positive_game(rng, posets) if order_positive else random_game(rng, posets)
    sched = random_schedule(rng, game.profiles, monotone=monotone)
    return None if sched is None else RepeatedGame(game, sched, random_rho(rng))
