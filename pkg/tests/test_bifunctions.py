"""Bifunction construction, evaluation, and the sampled admissibility check."""

import numpy as np
import pytest

from eqsplit.bifunctions import (
    AffineFunction,
    Quadratic,
    WeightedL1,
    check_admissibility,
    function_difference,
    generic_bifunction,
    operator_bifunction,
    sum_bifunctions,
    zero_bifunction,
)
from eqsplit.hilbert import Box, WholeSpace


def test_quadratic_validation():
    with pytest.raises(ValueError, match="symmetric"):
        Quadratic([[1.0, 2.0], [0.0, 1.0]], [0.0, 0.0])
    with pytest.raises(ValueError, match="semidefinite"):
        Quadratic([[-1.0]], [0.0])


def test_weighted_l1_validation():
    with pytest.raises(ValueError, match="nonnegative"):
        WeightedL1([-1.0])


def test_convex_function_values():
    f = Quadratic([[2.0, 0.0], [0.0, 4.0]], [1.0, -1.0])
    y = np.array([1.0, 2.0])
    assert f.value(y) == pytest.approx(1.0 + 8.0 + 1.0 - 2.0)
    np.testing.assert_allclose(f.subgradient(y), [2.0 + 1.0, 8.0 - 1.0])
    assert f.separable

    g = WeightedL1([1.0, 2.0])
    assert g.value([-1.0, 0.5]) == pytest.approx(2.0)
    np.testing.assert_allclose(g.subgradient([-1.0, 0.0]), [-1.0, 0.0])

    h = AffineFunction([1.0, 1.0], 3.0)
    assert h.value([1.0, 2.0]) == pytest.approx(6.0)


def test_batch_matches_scalar_eval():
    rng = np.random.default_rng(0)
    C = WholeSpace(2)
    cases = [
        operator_bifunction(C, [[2.0, 1.0], [1.0, 2.0]], [0.5, -0.5]),
        function_difference(C, Quadratic(np.eye(2), np.zeros(2))),
        function_difference(C, WeightedL1([1.0, 2.0])),
        generic_bifunction(C, lambda x, y: float(np.sum(y**2) - np.sum(x**2))),
    ]
    cases.append(sum_bifunctions(cases[0], cases[1]))
    for F in cases:
        x = rng.normal(size=2)
        Y = rng.normal(size=(16, 2))
        batch = F.eval_batch(x, Y)
        np.testing.assert_allclose(batch, [F(x, y) for y in Y], atol=1e-12)


def test_admissibility_check_quadratic_difference_passes():
    C = WholeSpace(1)
    G = function_difference(C, Quadratic([[2.0]], [0.0]))  # y^2 - x^2
    report = check_admissibility(G, samples=100, seed=0)
    assert report.passed
    assert max(report.worst_violations.values()) <= 1e-8


def test_admissibility_check_linear_operator_passes():
    C = WholeSpace(2)
    F = operator_bifunction(C, np.eye(2))  # <x, y - x>
    report = check_admissibility(F, samples=100, seed=1)
    assert report.passed


def test_admissibility_check_flags_nonvanishing_diagonal():
    C = WholeSpace(2)
    F = generic_bifunction(C, lambda x, y: float(np.linalg.norm(y) - 2.0 * np.linalg.norm(x)))
    report = check_admissibility(F, samples=50, seed=2)
    assert not report.passed
    assert report.worst_violations["diagonal"] > 1e-10


def test_admissibility_check_deterministic():
    C = Box([-1.0], [1.0])
    F = operator_bifunction(C, [[1.0]], [-2.0])
    r1 = check_admissibility(F, samples=32, seed=9)
    r2 = check_admissibility(F, samples=32, seed=9)
    assert r1.worst_violations == r2.worst_violations


def test_admissibility_check_nan_is_hard_error():
    C = WholeSpace(1)
    F = generic_bifunction(C, lambda x, y: float("nan"))
    with pytest.raises(ValueError, match="returned nan"):
        check_admissibility(F, samples=4, seed=0)


def test_sum_with_zero_is_identity():
    C = WholeSpace(1)
    F = function_difference(C, Quadratic([[2.0]], [0.0]))
    with pytest.raises(ValueError, match="share one ConvexSet"):
        sum_bifunctions(F, zero_bifunction(WholeSpace(1)))
    S = sum_bifunctions(F, zero_bifunction(C))
    rng = np.random.default_rng(3)
    for _ in range(20):
        x, y = rng.normal(size=2)
        assert S([x], [y]) == pytest.approx(F([x], [y]), abs=1e-14)


def test_sum_example_and_diagonal():
    C = WholeSpace(1)
    F = function_difference(C, Quadratic([[2.0]], [0.0]))  # y^2 - x^2
    G = operator_bifunction(C, [[0.0]], [1.0])  # y - x
    S = sum_bifunctions(F, G)
    assert S([0.0], [1.0]) == pytest.approx(2.0)
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = rng.normal(size=1)
        assert abs(S(x, x)) <= 1e-12


def test_sum_commutative_associative():
    C = WholeSpace(2)
    F = operator_bifunction(C, [[2.0, 1.0], [1.0, 2.0]])
    G = function_difference(C, WeightedL1([1.0, 1.0]))
    H = function_difference(C, Quadratic(np.eye(2), np.ones(2)))
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = rng.normal(size=2)
        y = rng.normal(size=2)
        a = sum_bifunctions(F, G)(x, y)
        b = sum_bifunctions(G, F)(x, y)
        assert a == pytest.approx(b, abs=1e-12)
        c = sum_bifunctions(sum_bifunctions(F, G), H)(x, y)
        d = sum_bifunctions(F, sum_bifunctions(G, H))(x, y)
        assert c == pytest.approx(d, abs=1e-12)


def test_family_tags():
    C = WholeSpace(1)
    assert zero_bifunction(C).family == "operator-induced"
    assert operator_bifunction(C, [[1.0]]).family == "operator-induced"
    assert function_difference(C, WeightedL1([1.0])).family == "function-difference"
    assert generic_bifunction(C, lambda x, y: 0.0).family == "generic"
    F = operator_bifunction(C, [[1.0]])
    assert sum_bifunctions(F, zero_bifunction(C)).family == "sum-of-two"
