"""Exact entropy, mutual information, and the summed-MI feasibility bound."""

import math

import numpy as np
import pytest

from effectaudit import (
    DiscreteJoint,
    chain_rule_check,
    conditional_entropy,
    entropy,
    max_independent_informative,
    mi_piranha_check,
    mutual_information,
)
from effectaudit.errors import (
    EmptySubsetError,
    IndexOutOfRangeError,
    InvalidJointError,
    InvalidPermutationError,
    OverlappingSubsetsError,
)

LN2 = math.log(2.0)


def random_joint(rng, num_vars=None, max_alphabet=4, sparse=False):
    sizes = tuple(int(s) for s in rng.integers(2, max_alphabet + 1, size=num_vars))
    w = rng.random(sizes)
    if sparse:
        mask = rng.random(sizes) < 0.6
        if not mask.any():
            mask.flat[0] = True
        w = w * mask
    w = w / w.sum()
    return DiscreteJoint.from_table(w)


def fair_bits_outcome_pair():
    """Two independent fair bits with y = (X1, X2) as a four-symbol outcome."""
    pmf = {(0, 0, 0): 0.25, (0, 1, 1): 0.25, (1, 0, 2): 0.25, (1, 1, 3): 0.25}
    return DiscreteJoint(alphabet_sizes=(2, 2, 4), pmf=pmf)


def test_joint_construction_invariants():
    with pytest.raises(InvalidJointError):
        DiscreteJoint(alphabet_sizes=(2,), pmf={(0,): 0.5, (1,): 0.6})  # mass 1.1
    with pytest.raises(InvalidJointError):
        DiscreteJoint(alphabet_sizes=(2,), pmf={(0,): -0.1, (1,): 1.1})
    with pytest.raises(InvalidJointError):
        DiscreteJoint(alphabet_sizes=(2,), pmf={(0, 0): 1.0})  # wrong arity
    with pytest.raises(InvalidJointError):
        DiscreteJoint(alphabet_sizes=(2,), pmf={(3,): 1.0})  # symbol out of range
    with pytest.raises(InvalidJointError):
        DiscreteJoint(alphabet_sizes=(101, 101, 101), pmf={(0, 0, 0): 1.0})  # > 1e6 cells


def test_entropy_bernoulli():
    # H(0.25, 0.75) = 0.25 log 4 + 0.75 log(4/3), summed directly
    j = DiscreteJoint(alphabet_sizes=(2,), pmf={(0,): 0.25, (1,): 0.75})
    oracle = 0.25 * math.log(4.0) + 0.75 * math.log(4.0 / 3.0)
    assert entropy(j, [0]) == pytest.approx(oracle, abs=1e-15)
    assert entropy(j, [0]) == pytest.approx(0.562335, abs=1e-6)


def test_entropy_units_toggle():
    rng = np.random.default_rng(2)
    for _ in range(50):
        j = random_joint(rng, num_vars=int(rng.integers(1, 4)))
        sub = [0]
        nats = entropy(j, sub, "nats")
        bits = entropy(j, sub, "bits")
        assert bits * LN2 == pytest.approx(nats, rel=1e-15, abs=1e-300)


def test_entropy_zero_cells_and_deterministic_variable():
    j = DiscreteJoint(alphabet_sizes=(3,), pmf={(1,): 1.0})
    assert entropy(j, [0]) == 0.0


def test_entropy_subset_validation():
    j = fair_bits_outcome_pair()
    with pytest.raises(EmptySubsetError):
        entropy(j, [])
    with pytest.raises(IndexOutOfRangeError):
        entropy(j, [3])


def test_conditional_entropy_uniform_three_atoms():
    # uniform on {(0,0), (0,1), (1,0)}: H(y | x) = (2/3) log 2
    j = DiscreteJoint(
        alphabet_sizes=(2, 2), pmf={(0, 0): 1 / 3, (0, 1): 1 / 3, (1, 0): 1 / 3}
    )
    assert conditional_entropy(j, [1], [0]) == pytest.approx((2 / 3) * LN2, abs=1e-12)
    assert conditional_entropy(j, [1], [0]) == pytest.approx(0.462098, abs=1e-6)


def test_conditional_entropy_reduces_entropy():
    # H(x | y, z) <= H(x | y) <= H(x) on random joints
    rng = np.random.default_rng(9)
    for i in range(1000):
        j = random_joint(rng, num_vars=3, sparse=(i % 2 == 0))
        h = entropy(j, [0])
        h_y = conditional_entropy(j, [0], [1])
        h_yz = conditional_entropy(j, [0], [1, 2])
        assert h_yz <= h_y + 1e-10
        assert h_y <= h + 1e-10
        assert h_yz >= -1e-12


def test_conditional_entropy_overlap_rejected():
    j = fair_bits_outcome_pair()
    with pytest.raises(OverlappingSubsetsError):
        conditional_entropy(j, [0, 1], [1])


def test_mutual_information_symmetric_and_nonnegative():
    rng = np.random.default_rng(31)
    for _ in range(300):
        j = random_joint(rng, num_vars=int(rng.integers(2, 5)))
        a, b = [0], [1]
        iab = mutual_information(j, a, b)
        iba = mutual_information(j, b, a)
        assert iab == pytest.approx(iba, abs=1e-12)
        assert iab >= -1e-12


def test_mutual_information_xor_is_zero():
    # y = x1 xor x2 with independent fair bits: I(X1; y) = 0
    j = DiscreteJoint(
        alphabet_sizes=(2, 2, 2),
        pmf={(0, 0, 0): 0.25, (0, 1, 1): 0.25, (1, 0, 1): 0.25, (1, 1, 0): 0.25},
    )
    assert mutual_information(j, [0], [2]) == pytest.approx(0.0, abs=1e-12)
    # but jointly the predictors determine y
    assert mutual_information(j, [0, 1], [2]) == pytest.approx(LN2, abs=1e-12)


def test_mi_check_equality_fixture():
    # y = (X1, X2): lhs = 2 log 2 equals rhs = H(y) = 2 log 2 exactly
    rep = mi_piranha_check(fair_bits_outcome_pair(), 2)
    assert rep.lhs == pytest.approx(2 * LN2, abs=1e-12)
    assert rep.rhs == pytest.approx(2 * LN2, abs=1e-12)
    assert rep.satisfied
    assert rep.rhs - rep.lhs == pytest.approx(0.0, abs=1e-12)


def test_mi_check_identical_copies():
    # X1 = X2 = y, one fair bit: lhs = 2 log 2, rhs = 3 log 2, slack log 2
    j = DiscreteJoint(alphabet_sizes=(2, 2, 2), pmf={(0, 0, 0): 0.5, (1, 1, 1): 0.5})
    rep = mi_piranha_check(j, 2)
    assert rep.lhs == pytest.approx(2 * LN2, abs=1e-12)
    assert rep.rhs == pytest.approx(3 * LN2, abs=1e-12)
    assert rep.rhs - rep.lhs == pytest.approx(LN2, abs=1e-12)


def test_mi_check_units_and_report_consistency():
    rep = mi_piranha_check(fair_bits_outcome_pair(), 2, units="bits")
    assert rep.h_y == pytest.approx(2.0, rel=1e-15)
    assert rep.lhs == pytest.approx(sum(rep.per_var_mi), abs=1e-12)
    assert rep.rhs == pytest.approx(rep.h_y + sum(rep.per_var_leaveout_mi), abs=1e-12)


def test_mi_check_outcome_index_validation():
    with pytest.raises(IndexOutOfRangeError):
        mi_piranha_check(fair_bits_outcome_pair(), 5)


def test_mi_check_single_predictor():
    j = DiscreteJoint(alphabet_sizes=(2, 2), pmf={(0, 0): 0.5, (1, 1): 0.5})
    rep = mi_piranha_check(j, 1)
    assert rep.per_var_leaveout_mi == (0.0,)
    assert rep.satisfied


def test_mi_check_random_joints_never_violate():
    rng = np.random.default_rng(77)
    for i in range(300):
        nv = int(rng.integers(2, 5))
        j = random_joint(rng, num_vars=nv, sparse=(i % 3 == 0))
        rep = mi_piranha_check(j, int(rng.integers(0, nv)))
        assert rep.satisfied
        assert rep.lhs <= rep.rhs + 1e-12


def test_grouping_inequality_on_random_joints():
    # I(X_all; y) >= sum_i [ I(X_i; y) - I(X_i; X_-i) ]
    rng = np.random.default_rng(123)
    for _ in range(200):
        nv = int(rng.integers(3, 5))
        j = random_joint(rng, num_vars=nv)
        y = nv - 1
        preds = list(range(nv - 1))
        lhs_total = mutual_information(j, preds, [y])
        acc = 0.0
        for i in preds:
            others = [k for k in preds if k != i]
            redund = mutual_information(j, [i], others) if others else 0.0
            acc += mutual_information(j, [i], [y]) - redund
        assert lhs_total >= acc - 1e-10


def test_chain_rule_all_orderings():
    rng = np.random.default_rng(13)
    from itertools import permutations

    for _ in range(25):
        j = random_joint(rng, num_vars=3)
        for order in permutations(range(3)):
            assert chain_rule_check(j, order)
    with pytest.raises(InvalidPermutationError):
        chain_rule_check(random_joint(rng, num_vars=3), [0, 1])
    with pytest.raises(InvalidPermutationError):
        chain_rule_check(random_joint(rng, num_vars=3), [0, 1, 1])


def test_max_independent_informative():
    # two bits of outcome entropy, half a bit each: at most 4 variables
    assert max_independent_informative(2 * LN2, 0.5 * LN2) == 4
    assert max_independent_informative(2.0, 0.5) == 4
    assert max_independent_informative(1.0, 0.3) == 3
    assert max_independent_informative(0.0, 0.5) == 0
