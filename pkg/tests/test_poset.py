import random
from itertools import product as cartesian

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import axioms, chains, inductive, relation_of
from splitnash.common import CapExceeded, Check
from splitnash.generators import random_poset
from splitnash.poset import (
    FinitePoset,
    OrderAxiomError,
    PosetError,
    ProductPoset,
    is_chain,
    is_chain_complete,
    is_inductive,
    maximal_elements,
    product,
    require_cap,
    upset,
    validate_poset,
)


def chain3():
    return FinitePoset.chain(["a", "b", "c"])


def diamond():
    return FinitePoset.from_covers(["bot", "l", "r", "top"], [("bot", "l"), ("bot", "r"), ("l", "top"), ("r", "top")])


# validate_poset


def test_singleton_relation_is_valid():
    p = validate_poset(["a"], [("a", "a")])
    assert p.size == 1 and p.leq(0, 0)


def test_two_chain_relation_is_valid():
    p = validate_poset(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b")])
    assert p.leq(0, 1) and not p.leq(1, 0)


def test_antisymmetry_violation_names_pair():
    with pytest.raises(OrderAxiomError) as exc:
        validate_poset(["a", "b"], [("a", "a"), ("b", "b"), ("a", "b"), ("b", "a")])
    assert exc.value.axiom == "antisymmetric"
    assert set(exc.value.witness) == {"a", "b"}


def test_reflexivity_violation():
    with pytest.raises(OrderAxiomError) as exc:
        validate_poset(["a", "b"], [("a", "a"), ("a", "b")])
    assert exc.value.axiom == "reflexive"


def test_transitivity_violation():
    rel = [("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "c")]
    with pytest.raises(OrderAxiomError) as exc:
        validate_poset(["a", "b", "c"], rel)
    assert exc.value.axiom == "transitive"


def test_unknown_label_rejected():
    with pytest.raises(PosetError):
        validate_poset(["a"], [("a", "z")])


def test_cover_cycle_rejected():
    with pytest.raises(OrderAxiomError):
        FinitePoset.from_covers(["a", "b"], [("a", "b"), ("b", "a")])


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**16 - 1))
def test_validate_matches_independent_axiom_checker(n, bits):
    labels = [f"e{i}" for i in range(n)]
    pairs = [(a, b) for a in range(n) for b in range(n)]
    rel = {pairs[k] for k in range(len(pairs)) if bits >> k & 1}
    expected = axioms(range(n), rel)
    named = [(labels[a], labels[b]) for a, b in sorted(rel)]
    if expected is None:
        p = validate_poset(labels, named)
        assert relation_of(p) == rel
    else:
        with pytest.raises(OrderAxiomError) as exc:
            validate_poset(labels, named)
        assert exc.value.axiom == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 7))
def test_covers_closure_is_a_valid_order(seed, n):
    p = random_poset(random.Random(seed), n)
    rel = relation_of(p)
    assert axioms(range(n), rel) is None
    rebuilt = FinitePoset.from_covers(p.labels, [(p.label(a), p.label(b)) for a, b in p.covers()])
    assert relation_of(rebuilt) == rel


# product


def test_unary_product_isomorphic():
    p = diamond()
    q = product([p])
    assert q.size == p.size
    assert all(q.leq(a, b) == p.leq(a, b) for a in range(4) for b in range(4))


def test_product_of_two_chains_is_diamond():
    c = FinitePoset.chain(["a", "b"])
    q = product([c, c])
    assert q.size == 4
    bottom, top = q.index((0, 0)), q.index((1, 1))
    for x in range(4):
        assert q.leq(bottom, x) and q.leq(x, top)
    # all 16 pairs against the coordinatewise rule
    for x, y in cartesian(q.profiles(), repeat=2):
        assert q.leq_profiles(x, y) == (x[0] <= y[0] and x[1] <= y[1])
    mids = [q.index((0, 1)), q.index((1, 0))]
    assert not q.comparable(*mids)


def test_product_with_antichain_second_coordinate():
    q = product([FinitePoset.chain(["a", "b"]), FinitePoset.antichain(["x", "y"])])
    assert not q.leq_profiles((0, 0), (1, 1))
    assert q.leq_profiles((0, 0), (1, 0))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_product_order_law(seed):
    rng = random.Random(seed)
    factors = [random_poset(rng, rng.randint(1, 4)) for _ in range(rng.randint(1, 3))]
    q = ProductPoset(factors)
    for a, b in cartesian(range(q.size), repeat=2):
        x, y = q.profile(a), q.profile(b)
        assert q.leq(a, b) == all(f.leq(u, v) for f, u, v in zip(factors, x, y))
        assert q.leq(a, b) == bool(q.up_mask(a) >> b & 1)


def test_product_index_is_lexicographic():
    q = product([chain3(), FinitePoset.chain(["x", "y"])])
    assert list(q.profiles()) == sorted(q.profiles())
    assert [q.index(p) for p in q.profiles()] == list(range(q.size))


def test_product_covers_are_single_coordinate_steps():
    q = product([chain3(), diamond()])
    for a, b in q.covers():
        x, y = q.profile(a), q.profile(b)
        assert sum(u != v for u, v in zip(x, y)) == 1
        assert q.lt(a, b)


def test_product_omit():
    q = product([chain3(), diamond(), FinitePoset.chain(["x", "y"])])
    o = q.omit(1)
    assert o.shape == (3, 2)


# upset, is_chain, maximal_elements


def test_upset_of_top_and_bottom():
    c = chain3()
    assert upset(c, 2) == [2]
    assert upset(c, 0) == [0, 1, 2]


def test_upset_mid_of_diamond():
    d = diamond()
    assert upset(d, d.index("l")) == [d.index("l"), d.index("top")]


def test_upset_join_law_on_lattices():
    c = FinitePoset.chain(["a", "b"])
    for q in (product([c, c]), product([chain3(), c]), product([c, c, c])):
        for x, y in cartesian(range(q.size), repeat=2):
            join = q.index(tuple(max(u, v) for u, v in zip(q.profile(x), q.profile(y))))
            assert set(upset(q, x)) & set(upset(q, y)) == set(upset(q, join))


def test_is_chain_examples():
    d = diamond()
    assert is_chain(d, [1])
    assert not is_chain(d, [d.index("l"), d.index("r")])
    assert is_chain(chain3(), [0, 1, 2])


def test_maximal_elements_examples():
    assert maximal_elements(chain3(), [0, 1, 2]) == [2]
    assert maximal_elements(FinitePoset.antichain(["a", "b"]), [0, 1]) == [0, 1]
    d = diamond()
    assert maximal_elements(d, [0, 1, 2]) == [d.index("l"), d.index("r")]


# chain completeness and inductivity


def test_chain_complete_examples():
    assert is_chain_complete(FinitePoset.antichain(["a", "b"])).holds
    assert is_chain_complete(chain3()).holds
    assert is_chain_complete(diamond()).certificate == "enumerated"


def test_chain_complete_above_cap_is_by_theorem():
    big = FinitePoset.chain([str(i) for i in range(25)])
    res = is_chain_complete(big)
    assert res.holds and res.certificate == "by-theorem"


def test_inductive_examples():
    d = diamond()
    assert is_inductive(d, [2]).holds
    assert is_inductive(d, range(4)).holds


def test_inductive_of_empty_subset_rejected():
    with pytest.raises(PosetError):
        is_inductive(diamond(), [])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6))
def test_finite_case_theorems_agree_with_enumeration(seed, n):
    rng = random.Random(seed)
    p = random_poset(rng, n)
    # the oracle enumerates chains by subsets and checks for a least upper bound
    for ch in chains(range(n), p.leq):
        ubs = [u for u in range(n) if all(p.leq(c, u) for c in ch)]
        assert any(all(p.leq(u, v) for v in ubs) for u in ubs)
    assert is_chain_complete(p).holds
    subset = rng.sample(range(n), rng.randint(1, n))
    assert inductive(subset, p.leq)
    assert is_inductive(p, subset).holds


def test_check_is_truthy():
    assert Check(True) and not Check(False)


def test_require_cap():
    require_cap("x", 3, 3)
    with pytest.raises(CapExceeded):
        require_cap("x", 4, 3)
