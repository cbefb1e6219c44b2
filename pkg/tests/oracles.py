"""Independent brute-force references used by the tests.

These work on plain Python data (label tuples, dicts, explicit relation
sets) and share no code paths with the package's bitmask machinery.
"""

from fractions import Fraction
from itertools import combinations, product


def relation_of(poset):
    return {(a, b) for a in range(poset.size) for b in range(poset.size) if poset.leq(a, b)}


def axioms(elements, rel):
    """Name of the first failing order axiom, or None."""
    for a in elements:
        if (a, a) not in rel:
            return "reflexive"
    for a, b in rel:
        if a != b and (b, a) in rel:
            return "antisymmetric"
    for a, b in rel:
        for c, d in rel:
            if b == c and (a, d) not in rel:
                return "transitive"
    return None


def chains(elements, leq):
    """All nonempty chains, produced by subset enumeration."""
    out = []
    for r in range(1, len(elements) + 1):
        for sub in combinations(elements, r):
            if all(leq(a, b) or leq(b, a) for a, b in combinations(sub, 2)):
                out.append(sub)
    return out


def inductive(subset, leq):
    subset = list(subset)
    return all(any(all(leq(c, u) for c in ch) for u in subset) for ch in chains(subset, leq))


def utilities(game):
    """``{profile: (f_1, ..., f_n)}`` read straight off the tables."""
    return {p: tuple(t[k] for t in game.tables) for k, p in enumerate(game.profiles.profiles())}


def strategy_sets(game):
    return [range(p.size) for p in game.posets]


def subst(x, i, v):
    return tuple(v if j == i else x[j] for j in range(len(x)))


def nash(game):
    u = utilities(game)
    out = []
    for x in product(*strategy_sets(game)):
        if all(u[subst(x, i, s)][i] <= u[x][i] for i in range(game.n) for s in strategy_sets(game)[i]):
            out.append(x)
    return out


def pi_oracle(game, A, x):
    """Literal double loop over t and every (z, defining inequality)."""
    u = utilities(game)
    prof = list(product(*strategy_sets(game)))
    Ax = A(x)
    out = []
    for t in prof:
        At = A(t)
        ok = True
        for z in prof:
            Az = A(z)
            for i in range(game.n):
                if u[subst(x, i, z[i])][i] > u[subst(x, i, t[i])][i]:
                    ok = False
                if u[subst(Ax, i, Az[i])][i] > u[subst(Ax, i, At[i])][i]:
                    ok = False
        if ok:
            out.append(t)
    return out


def in_own_pi(game, A, x):
    """``x ∈ π(x)``: the same double loop with ``t = x`` fixed."""
    u = utilities(game)
    Ax = A(x)
    for z in product(*strategy_sets(game)):
        Az = A(z)
        for i in range(game.n):
            if u[subst(x, i, z[i])][i] > u[x][i] or u[subst(Ax, i, Az[i])][i] > u[Ax][i]:
                return False
    return True


def split_ne_oracle(game, A):
    return [x for x in product(*strategy_sets(game)) if in_own_pi(game, A, x)]


def compose(ops, x):
    for op in ops:
        x = op(x)
    return x


def trajectory_ops(schedule, K):
    """``[A_1, ..., A_K]`` from a prefix/cycle schedule."""
    pre, cyc = list(schedule.prefix), list(schedule.cycle)
    return [pre[k] if k < len(pre) else cyc[(k - len(pre)) % len(cyc)] for k in range(K)]


def inf_split_oracle(game, schedule, x, K):
    """Deviation condition at every ``k <= K`` with explicit composition."""
    u = utilities(game)
    prof = list(product(*strategy_sets(game)))
    ops = trajectory_ops(schedule, K)
    for k in range(K + 1):
        px = compose(ops[:k], x)
        for z in prof:
            pz = compose(ops[:k], z)
            for i in range(game.n):
                if u[subst(px, i, pz[i])][i] > u[px][i]:
                    return False
    return True


def truncated(game, schedule, rho, i, z, x, K):
    u = utilities(game)
    ops = trajectory_ops(schedule, K)
    total = Fraction(0)
    for k in range(K + 1):
        px, pz = compose(ops[:k], x), compose(ops[:k], z)
        total += rho**k * u[subst(px, i, pz[i])][i]
    return total


def bertrand_profit(c1, c2, d, cap1, cap2, firm, p1, p2):
    """Direct formula: clamped linear demand, literal tie shares, cap rule."""
    lam = Fraction(c1) / c2
    dem = max(Fraction(0), d[0] - d[1] * p1 - d[2] * p2)
    if p1 < lam * p2:
        s1, s2 = dem, Fraction(0)
    elif p1 > lam * p2:
        s1, s2 = Fraction(0), dem
    else:
        s1, s2 = dem * c1 / (c1 + c2), dem * c2 / (c1 + c2)
    if p1 >= cap1:
        s1 = Fraction(0)
    if p2 >= cap2:
        s2 = Fraction(0)
    return (p1 - c1) * s1 if firm == 1 else (p2 - c2) * s2


def bertrand_nash(model):
    args = (model.c1, model.c2, model.demand_coeffs, model.p_bar1, model.p_bar2)
    out = []
    for a in model.grid1:
        for b in model.grid2:
            f1 = bertrand_profit(*args, 1, a, b)
            f2 = bertrand_profit(*args, 2, a, b)
            if all(bertrand_profit(*args, 1, q, b) <= f1 for q in model.grid1) and all(
                bertrand_profit(*args, 2, a, q) <= f2 for q in model.grid2
            ):
                out.append((a, b))
    return out
