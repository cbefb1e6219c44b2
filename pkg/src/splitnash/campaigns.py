"""Seeded randomized property campaigns over small games.

Each campaign returns a :class:`CampaignResult`; ``violations`` lists a short
description and the seed-local instance number of every failure.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .dual import DualGame, ProfileOperator, check_theorem1, gamma, split_ne_set
from .fixedpoint import EmptyValueError, fixed_points, verify_theorem_a
from .game import bound_M, nash_set
from .generators import (
    random_dual,
    random_game,
    random_increasing_upward_map,
    random_poset,
    random_posets,
    random_repeated,
    random_rho,
)
from .repeated import (
    H,
    OperatorSchedule,
    RepeatedGame,
    check_proposition1,
    check_theorem2,
    h,
    inf_split_ne_set,
    truncated_H,
    truncated_h,
)


@dataclass
class CampaignResult:
    name: str
    seed: int
    attempts: int
    instances: int = 0
    conforming: int = 0
    violations: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "attempts": self.attempts,
            "instances": self.instances,
            "conforming": self.conforming,
            "violations": list(self.violations),
            "ok": self.ok,
        }


def theorem_a_campaign(seed: int = 0, attempts: int = 300) -> CampaignResult:
    rng = random.Random(seed)
    res = CampaignResult("theoremA", seed, attempts)
    t0 = time.perf_counter()
    for k in range(attempts):
        gm = random_increasing_upward_map(rng, random_poset(rng, rng.randint(1, 8)))
        res.instances += 1
        report = verify_theorem_a(gm)
        if report.hypotheses_hold:
            res.conforming += 1
        for v in report.violations:
            res.violations.append(f"instance {k}: {v}")
    res.elapsed = time.perf_counter() - t0
    return res


def theorem1_campaign(seed: int = 0, attempts: int = 300) -> CampaignResult:
    """Conclusions must hold on every dual game meeting conditions a)-d)."""
    rng = random.Random(seed)
    res = CampaignResult("theorem1", seed, attempts)
    t0 = time.perf_counter()
    for k in range(attempts):
        dual = random_dual(rng, monotone=True, order_positive=True)
        if dual is None:
            continue
        res.instances += 1
        report = check_theorem1(dual)
        if report.conditions_hold:
            res.conforming += 1
        for v in report.violations:
            res.violations.append(f"instance {k}: {v}")
    res.elapsed = time.perf_counter() - t0
    return res


def theorem2_campaign(seed: int = 0, attempts: int = 300) -> CampaignResult:
    rng = random.Random(seed)
    res = CampaignResult("theorem2", seed, attempts)
    t0 = time.perf_counter()
    for k in range(attempts):
        rg = random_repeated(rng, monotone=True, order_positive=True)
        if rg is None:
            continue
        res.instances += 1
        report = check_theorem2(rg)
        if report.conditions_hold:
            res.conforming += 1
        for v in report.violations:
            res.violations.append(f"instance {k}: {v}")
    res.elapsed = time.perf_counter() - t0
    return res


def fixed_point_campaign(seed: int = 0, attempts: int = 300) -> CampaignResult:
    """Split equilibria coincide with fixed points of the value map whenever
    that map has no empty value."""
    rng = random.Random(seed)
    res = CampaignResult("fixed-points", seed, attempts)
    t0 = time.perf_counter()
    for k in range(attempts):
        dual = random_dual(rng, monotone=True)
        if dual is None:
            continue
        res.instances += 1
        try:
            gm = gamma(dual)
        except EmptyValueError:
            continue
        res.conforming += 1
        sp = dual.game.profiles
        if [sp.profile(x) for x in fixed_points(gm)] != split_ne_set(dual):
            res.violations.append(f"instance {k}: split equilibria differ from fixed points")
    res.elapsed = time.perf_counter() - t0
    return res


def proposition1_campaign(seed: int = 0, attempts: int = 100) -> CampaignResult:
    rng = random.Random(seed)
    res = CampaignResult("proposition1", seed, attempts)
    t0 = time.perf_counter()
    for k in range(attempts):
        rg = random_repeated(rng, monotone=False)
        if rg is None:
            continue
        res.instances += 1
        rep = check_proposition1(rg)
        res.conforming += 1
        if not rep.holds:
            res.violations.append(f"instance {k}: {rep.missing} not repeated equilibria")
    res.elapsed = time.perf_counter() - t0
    return res


def discounted_campaign(seed: int = 0, attempts: int = 40, horizons=(10, 30, 60)) -> CampaignResult:
    """Closed forms against truncated sums, plus ``H(x, x) = h(x)``."""
    rng = random.Random(seed)
    res = CampaignResult("discounted", seed, attempts)
    t0 = time.perf_counter()
    for k in range(attempts):
        rg = random_repeated(rng, monotone=False)
        if rg is None:
            continue
        res.instances += 1
        g = rg.game
        profiles = g.profiles.profiles()
        M = bound_M(g)
        rho = rg.rho
        bad = False
        for x in rng.sample(profiles, min(3, len(profiles))):
            for i in range(g.n):
                hx = h(rg, i, x)
                if H(rg, i, x, x) != hx:
                    res.violations.append(f"instance {k}: H(x, x) != h(x) for player {i} at {x}")
                    bad = True
                z = rng.choice(profiles)
                Hz = H(rg, i, z, x)
                for K in horizons:
                    tol = M * rho ** (K + 1) / (1 - rho)
                    if abs(hx - truncated_h(rg, i, x, K)) > tol or abs(Hz - truncated_H(rg, i, z, x, K)) > tol:
                        res.violations.append(f"instance {k}: truncation K={K} outside bound for player {i}")
                        bad = True
        if not bad:
            res.conforming += 1
    res.elapsed = time.perf_counter() - t0
    return res


def reduction_campaign(seed: int = 0, attempts: int = 100) -> CampaignResult:
    """Identity operator and identity schedule both reduce to plain Nash."""
    rng = random.Random(seed)
    res = CampaignResult("reductions", seed, attempts)
    t0 = time.perf_counter()
    for k in range(attempts):
        game = random_game(rng, random_posets(rng))
        res.instances += 1
        ne = nash_set(game)
        sp = game.profiles
        ok = True
        if split_ne_set(DualGame(game, ProfileOperator.identity(sp))) != ne:
            res.violations.append(f"instance {k}: identity operator changes the equilibrium set")
            ok = False
        rg = RepeatedGame(game, OperatorSchedule.identity(sp), random_rho(rng))
        if inf_split_ne_set(rg) != ne:
            res.violations.append(f"instance {k}: identity schedule changes the equilibrium set")
            ok = False
        res.conforming += ok
    res.elapsed = time.perf_counter() - t0
    return res


CAMPAIGNS = {
    "theoremA": theorem_a_campaign,
    "theorem1": theorem1_campaign,
    "theorem2": theorem2_campaign,
    "fixed-points": fixed_point_campaign,
    "proposition1": proposition1_campaign,
    "discounted": discounted_campaign,
    "reductions": reduction_campaign,
}
