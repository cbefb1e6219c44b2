from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import asymmetric, symmetric
from oracles import bertrand_nash, bertrand_profit
from splitnash.bertrand import (
    AVERAGE,
    IDENTITY,
    SWAP,
    BertrandModel,
    ModelError,
    OffGridError,
    PriceTransform,
    TransformSchedule,
    apply_transform,
    corollary4,
    demand,
    period_violations,
    exact_inf_split_check,
    exact_inf_split_set,
    grid_distance,
    profit,
    sales,
    schedule_from_transforms,
    shares,
    static_game,
    verify_static,
    verify_theorem3,
)
from splitnash.game import bound_M, is_nash, is_order_positive, nash_set
from splitnash.repeated import RepeatedGame, inf_split_ne_set

prices = st.fractions(min_value=0, max_value=5, max_denominator=8)


def test_demand_examples(asym_model):
    assert demand(asym_model, 1, 2) == 9
    assert demand(asym_model, 4, 4) == 4
    big = BertrandModel.uniform(1, 2, 20, 20, 1)
    assert demand(big, 10, 10) == 0


def test_demand_at_costs_must_be_positive():
    with pytest.raises(ModelError, match="strictly positive"):
        BertrandModel.uniform(1, 2, 4, 4, "1/4", (3, 1, 1))


def test_model_validation():
    with pytest.raises(ModelError):
        BertrandModel.uniform(2, 1, 4, 4, 1)
    with pytest.raises(ModelError):
        BertrandModel.uniform(1, 2, 4, 2, 1)
    with pytest.raises(ModelError, match="contain the cost"):
        BertrandModel.uniform(1, 2, 4, 4, "2/3")
    with pytest.raises(ModelError):
        demand(asymmetric(), -1, 1)


def test_sales_examples(asym_model):
    assert asym_model.lam == F(1, 2)
    assert sales(asym_model, 1, 2) == (3, 6)
    assert shares(asym_model, F(1), F(2)) == (F(1, 3), F(2, 3))
    assert sales(asym_model, 1, 3) == (8, 0)
    assert sales(asym_model, 2, 2) == (0, 8)


def test_cap_rule_zeroes_sales(asym_model):
    # firm 1 undercuts but sits at its cap
    assert sales(asym_model, 4, 4) == (0, 0)
    assert sales(asym_model, 1, 4) == (7, 0)


def test_profit_examples(asym_model):
    assert profit(asym_model, 2, 1, 2) == 0
    assert profit(asym_model, 1, 1, 2) == 0
    assert profit(asym_model, 1, F(3, 2), 4) == F(13, 4)


@settings(max_examples=300, deadline=None)
@given(prices, prices)
def test_share_trichotomy_and_market_clearing(p1, p2):
    m = asymmetric()
    s1, s2 = shares(m, p1, p2)
    branches = [p1 < m.lam * p2, p1 == m.lam * p2, p1 > m.lam * p2]
    assert sum(branches) == 1
    assert s1 + s2 == 1
    d1, d2 = sales(m, p1, p2)
    if p1 < m.p_bar1 and p2 < m.p_bar2:
        assert d1 + d2 == demand(m, p1, p2)
    for firm in (1, 2):
        assert profit(m, firm, p1, p2) == bertrand_profit(1, 2, (12, 1, 1), 4, 4, firm, p1, p2)


def test_apply_transform_examples():
    assert (apply_transform(IDENTITY, 1, 2).p1, apply_transform(IDENTITY, 1, 2).p2) == (1, 2)
    s = apply_transform(SWAP, 1, 2)
    assert (s.p1, s.p2) == (2, 1)
    assert s.p1_nondecreasing and s.p2_nonincreasing
    a = apply_transform(AVERAGE, 1, 2)
    assert (a.p1, a.p2) == (F(3, 2), F(3, 2))


def test_monotone_flags_are_measured_not_assumed():
    t = PriceTransform(F(1, 4), F(3, 4))
    step = apply_transform(t, 1, 2)
    assert step.p1 == F(3, 4) and not step.p1_nondecreasing


@settings(max_examples=200, deadline=None)
@given(st.fractions(0, 1, max_denominator=8), st.fractions(0, 1, max_denominator=8), prices, prices)
def test_transforms_are_column_stochastic(a, b, p1, p2):
    t = PriceTransform(a, b)
    m = t.matrix
    assert m[0][0] + m[1][0] == 1 and m[0][1] + m[1][1] == 1
    q1, q2 = t(p1, p2)
    assert q1 + q2 == p1 + p2


def test_transform_bounds():
    with pytest.raises(ModelError):
        PriceTransform(F(3, 2), 0)


def test_static_game_costs_nash_and_bound(asym_model):
    g = static_game(asym_model)
    x = asym_model.grid_profile(asym_model.costs)
    assert is_nash(g, x)
    assert bound_M(g) == max(abs(v) for t in g.tables for v in t)
    # measured, not assumed
    assert [is_order_positive(g, i).holds for i in range(2)] == [False, False]


@pytest.mark.parametrize("model", [asymmetric(), symmetric(), asymmetric("1/2"), symmetric("1/8")])
def test_static_nash_matches_direct_scan(model):
    g = static_game(model)
    assert [model.prices_of(p) for p in nash_set(g)] == bertrand_nash(model)


@pytest.mark.parametrize("model", [asymmetric(), symmetric()])
def test_unilateral_deviation_from_costs_unprofitable(model):
    c1, c2 = model.costs
    assert all(profit(model, 1, p, c2) <= 0 for p in model.grid1)
    assert all(profit(model, 2, c1, p) <= 0 for p in model.grid2)
    assert verify_static(model)["max_unilateral_deviation_profit"] <= 0


def test_schedule_from_identity_transform(asym_model):
    sched = schedule_from_transforms(asym_model, TransformSchedule())
    assert all(op.is_identity for op in sched.operators)


def test_swap_on_symmetric_grids_is_coordinate_swap(sym_model):
    sched = schedule_from_transforms(sym_model, TransformSchedule((), (SWAP,)))
    op = sched.cycle[0]
    for p in op.space.profiles():
        assert op(p) == (p[1], p[0])


def test_average_leaves_grid_with_step_one_half():
    model = BertrandModel.uniform(1, 1, 2, 2, "1/2", (10, 2, 2))
    with pytest.raises(OffGridError) as exc:
        schedule_from_transforms(model, TransformSchedule((), (AVERAGE,)))
    assert exc.value.point == (0, F(1, 2))
    assert exc.value.image == (F(1, 4), F(1, 4))


def test_average_membership_needs_no_grid_closure():
    # the exact route evaluates off-grid trajectory points directly
    model = symmetric()
    assert exact_inf_split_check(model, TransformSchedule((), (AVERAGE,)), model.costs).holds


def test_theorem3_symmetric_identity(sym_model):
    r = verify_theorem3(sym_model, TransformSchedule())
    assert r.case == "i" and r.member.holds and r.ok
    assert r.table_crosscheck is True


def test_theorem3_asymmetric_identity(asym_model):
    r = verify_theorem3(asym_model, TransformSchedule())
    assert r.case == "ii" and r.member.holds and r.ok
    assert asym_model.costs in r.members


def test_theorem3_asymmetric_swap_witness(asym_model):
    sched = TransformSchedule((), (SWAP,))
    r = verify_theorem3(asym_model, sched)
    assert not r.member.holds and r.ok
    w = r.member.witness
    assert (w.k, w.firm) == (1, 2)
    assert w.path_point == (2, 1)
    assert w.deviation_profit > 0 > w.path_profit
    assert w.replay(asym_model)
    assert w.path_profit == -demand(asym_model, 2, 1) == -9
    # the hand-derived deviation price 3 is among the violators
    viol = {v.deviation_price: v for v in period_violations(asym_model, sched, asym_model.costs, 1, 2)}
    assert viol[F(3)].deviation_profit == 7 == (3 - 2) * demand(asym_model, 2, 3)
    assert all(v.replay(asym_model) for v in viol.values())
    assert max(v.deviation_profit for v in viol.values()) == w.deviation_profit


def test_exact_and_table_routes_agree_on_grid(sym_model, asym_model):
    for model in (sym_model, asym_model):
        for sched in (TransformSchedule(), TransformSchedule((), (SWAP,)), TransformSchedule((IDENTITY,), (SWAP, IDENTITY))):
            game = static_game(model)
            rg = RepeatedGame(game, schedule_from_transforms(model, sched, game), F(1, 2))
            table = [model.prices_of(p) for p in inf_split_ne_set(rg)]
            assert table == exact_inf_split_set(model, sched)


def test_off_grid_average_decided_exactly(sym_model):
    sched = TransformSchedule((), (AVERAGE,))
    r = verify_theorem3(sym_model, sched)
    assert not r.on_grid and r.off_grid_reason
    assert r.member.holds and not r.member.partial
    assert r.members == [sym_model.costs]


def test_extra_grid_equilibria_reported(asym_model):
    r = verify_theorem3(asym_model, TransformSchedule())
    reported = {p for p, _ in r.extra_equilibria}
    assert reported == set(r.members) - {asym_model.costs}
    assert reported == {(F(1), F(9, 4)), (F(5, 4), F(5, 2))}
    assert dict(r.extra_equilibria)[(F(5, 4), F(5, 2))] == (1, 2)


@pytest.mark.parametrize("h", [F(1, 2), F(1, 4), F(1, 8)])
def test_grid_equilibria_distances_measured(h):
    sym = symmetric(h)
    assert all(max(grid_distance(sym, p)) <= 1 for p in bertrand_nash(sym))
    asym = asymmetric(h)
    expected = [(F(1), F(2)), (F(1), 2 + h), (1 + h, 2 + 2 * h)]
    assert bertrand_nash(asym) == expected
    assert [grid_distance(asym, p) for p in expected] == [(0, 0), (0, 1), (1, 2)]


def test_corollary4(asym_model):
    assert corollary4(asym_model, F(1, 2)) == (0, 0)
    assert corollary4(asym_model, F(9, 10)) == (0, 0)
    assert profit(asym_model, 1, 1, 2) == 0 and profit(asym_model, 2, 1, 2) == 0


def test_grid_distance(asym_model):
    assert grid_distance(asym_model, (F(5, 4), F(5, 2))) == (1, 2)
