import random
from itertools import product as cartesian

from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import nash, pi_oracle, split_ne_oracle, subst, utilities
from splitnash.bertrand import static_game
from splitnash.dual import (
    SUFFICIENCY_NOTE,
    DualGame,
    ProfileOperator,
    check_theorem1,
    gamma,
    is_increasing,
    is_increasing_bruteforce,
    is_split_ne,
    pi,
    pi_vector_form,
    split_ne_set,
)
from splitnash.fixedpoint import EmptyValueError, fixed_points
from splitnash.game import StaticGame, is_nash, is_order_positive, nash_set
from splitnash.generators import random_dual, random_game, random_operator, random_posets
from splitnash.poset import FinitePoset

C2 = FinitePoset.chain(["lo", "hi"])


def sample_game():
    return StaticGame.from_mappings(
        [C2, C2],
        {(0, 0): [0, 0], (0, 1): [0, 1], (1, 0): [1, 0], (1, 1): [2, 2]},
    )


def swap(space):
    return ProfileOperator.from_function(space, lambda p: (p[1], p[0]))


def constant_game(sizes=(2, 3)):
    posets = [FinitePoset.chain([f"s{k}" for k in range(n)]) for n in sizes]
    return StaticGame.from_function(posets, lambda p: [0] * len(sizes))


def seeded_dual(seed, monotone=True):
    rng = random.Random(seed)
    while True:
        d = random_dual(rng, monotone=monotone)
        if d is not None:
            return d


def test_operator_must_be_total():
    g = sample_game()
    try:
        ProfileOperator(g.profiles, [0, 1])
    except ValueError as exc:
        assert "not total" in str(exc)
    else:
        raise AssertionError("partial operator accepted")


def test_identity_and_constant_operators_increasing():
    sp = sample_game().profiles
    assert is_increasing(ProfileOperator.identity(sp))
    assert is_increasing(ProfileOperator(sp, [2] * sp.size))


def test_order_reversing_operator_is_caught():
    sp = sample_game().profiles
    # send bottom to top and top to bottom
    table = list(range(4))
    table[0], table[3] = 3, 0
    op = ProfileOperator(sp, table)
    res = is_increasing(op)
    assert not res
    x, y = res.witness
    assert sp.leq_profiles(x, y) and not sp.leq_profiles(op(x), op(y))
    assert not is_increasing_bruteforce(op)


def test_operator_composition():
    sp = sample_game().profiles
    s = swap(sp)
    assert s.compose(s).is_identity
    assert s.compose(ProfileOperator.identity(sp)) == s


def test_pi_identity_constant_game_is_everything():
    g = constant_game()
    d = DualGame(g, ProfileOperator.identity(g.profiles))
    for x in g.profiles.profiles():
        assert pi(d, x) == list(g.profiles.profiles())


def test_pi_single_profile_game():
    one = FinitePoset.chain(["only"])
    g = StaticGame.from_function([one, one], lambda p: [1, 2])
    d = DualGame(g, ProfileOperator.identity(g.profiles))
    assert pi(d, (0, 0)) == [(0, 0)]
    assert gamma(d)(0) == [0]


def test_pi_sample_swap_matches_double_loop():
    g = sample_game()
    d = DualGame(g, swap(g.profiles))
    for x in g.profiles.profiles():
        assert pi(d, x) == pi_oracle(g, d.operator, x) == pi_vector_form(d, x)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_pi_matches_oracle_on_random_duals(seed, monotone):
    d = seeded_dual(seed, monotone)
    for x in d.game.profiles.profiles():
        assert pi(d, x) == pi_oracle(d.game, d.operator, x)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_identity_operator_reduces_to_nash(seed):
    rng = random.Random(seed)
    g = random_game(rng, random_posets(rng))
    d = DualGame(g, ProfileOperator.identity(g.profiles))
    assert split_ne_set(d) == nash_set(g) == nash(g)
    for x in g.profiles.profiles():
        assert bool(is_split_ne(d, x)) == bool(is_nash(g, x))


def test_constant_game_every_profile_split():
    g = constant_game()
    d = DualGame(g, swap_like(g))
    assert split_ne_set(d) == list(g.profiles.profiles())
    assert all(is_split_ne(d, x) for x in g.profiles.profiles())


def swap_like(g):
    return random_operator(random.Random(5), g.profiles)


def test_bertrand_dual_identity_at_costs(asym_model):
    g = static_game(asym_model)
    d = DualGame(g, ProfileOperator.identity(g.profiles))
    assert is_split_ne(d, asym_model.grid_profile(asym_model.costs))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_split_set_matches_oracle_and_witnesses_replay(seed, monotone):
    d = seeded_dual(seed, monotone)
    g, A = d.game, d.operator
    u = utilities(g)
    assert split_ne_set(d) == split_ne_oracle(g, A)
    for x in g.profiles.profiles():
        res = is_split_ne(d, x)
        if res:
            continue
        i, z, stage = res.witness
        if stage == 1:
            assert u[subst(x, i, z[i])][i] > u[x][i]
        else:
            Ax, Az = A(x), A(z)
            assert is_nash(g, x)
            assert u[subst(Ax, i, Az[i])][i] > u[Ax][i]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_split_set_equals_fixed_points_when_constructible(seed):
    d = seeded_dual(seed)
    sp = d.game.profiles
    try:
        gm = gamma(d)
    except EmptyValueError:
        return
    assert [sp.profile(x) for x in fixed_points(gm)] == split_ne_set(d)
    for x in range(sp.size):
        assert [sp.profile(v) for v in gm(x)] == pi(d, sp.profile(x))


def test_gamma_constant_game_is_full():
    g = constant_game()
    d = DualGame(g, ProfileOperator.identity(g.profiles))
    gm = gamma(d)
    assert all(gm(x) == list(range(g.profiles.size)) for x in range(g.profiles.size))


def test_gamma_sample_matches_bruteforce():
    g = sample_game()
    d = DualGame(g, swap(g.profiles))
    gm = gamma(d)
    sp = g.profiles
    for x in range(sp.size):
        assert [sp.profile(v) for v in gm(x)] == pi_oracle(g, d.operator, sp.profile(x))


def test_theorem1_constant_identity_passes():
    g = constant_game()
    r = check_theorem1(DualGame(g, ProfileOperator.identity(g.profiles)))
    assert r.conditions_hold and not r.violations
    assert r.split_ne == list(g.profiles.profiles())
    assert SUFFICIENCY_NOTE in r.notes


def test_theorem1_condition_c_failure_pinpointed():
    g = constant_game(sizes=(2, 2))
    sp = g.profiles
    table = list(range(4))
    table[0], table[3] = 3, 0
    r = check_theorem1(DualGame(g, ProfileOperator(sp, table)))
    assert not r.condition_c
    x, y = r.condition_c.witness
    assert sp.leq_profiles(x, y)
    # no conclusion is asserted, only the fixed point cross-check
    assert r.inductive is None and r.maximal_above_witness is None
    assert r.violations == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_monotone_growth_under_a_and_c(seed):
    rng = random.Random(seed)
    d = random_dual(rng, monotone=True, order_positive=True)
    if d is None:
        return
    g = d.game
    assert all(is_order_positive(g, i) for i in range(g.n)) and is_increasing(d.operator)
    sp = g.profiles
    for x, y in cartesian(sp.profiles(), repeat=2):
        if sp.leq_profiles(x, y):
            assert set(pi(d, x)) <= set(pi(d, y))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_theorem1_conclusions(seed):
    rng = random.Random(seed)
    d = random_dual(rng, monotone=True, order_positive=True)
    if d is None:
        return
    r = check_theorem1(d)
    assert r.violations == []
    if r.conditions_hold:
        sp = d.game.profiles
        xp = r.condition_d.witness[0]
        assert r.split_ne and r.inductive
        assert r.above_witness == [p for p in r.split_ne if sp.leq_profiles(xp, p)]
        assert r.maximal_above_witness in r.above_witness
