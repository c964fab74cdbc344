import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from birank.separability import (
    FuzzReport,
    check_intertwining,
    dump_counterexamples,
    fuzz_intertwining,
    is_univariate,
    nonseparability_score,
    separability_certificate,
    support_box,
)
from birank.trigpoly import TrigPoly2


def test_support_box_and_univariate():
    p = TrigPoly2.univariate([1, 2, 3], axis=1, start=-1)
    assert support_box(p) == (support_box(p).__class__(-1, 1, 0, 0))
    assert is_univariate(p, 1) and not is_univariate(p, 2)
    q = TrigPoly2.monomial(1, 1)
    assert not is_univariate(q, 1) and not is_univariate(q, 2)
    assert is_univariate(TrigPoly2.constant(2.0), 1) and is_univariate(TrigPoly2.constant(2.0), 2)
    with pytest.raises(ValueError):
        support_box(TrigPoly2())
    with pytest.raises(ValueError):
        is_univariate(p, 3)


@pytest.mark.parametrize("alpha,beta", [(2, 2), (2, 3), (3, 3)])
def test_univariate_pairs_satisfy_relation(alpha, beta):
    a = TrigPoly2.univariate([1, -2, 1], axis=1)
    b = TrigPoly2.univariate([3, 0, 1], axis=2, start=-1)
    v = check_intertwining(a, b, alpha, beta)
    assert v.holds and v.conclusion_verified and not v.counterexample


def test_mixed_pair_violates_relation():
    a = TrigPoly2.constant(1) + TrigPoly2.monomial(0, 1)
    b = TrigPoly2.constant(1) + TrigPoly2.monomial(1, 1)
    v = check_intertwining(a, b, 2, 2)
    assert not v.holds and v.conclusion_verified is None
    assert v.residual.max_abs() > 0.5


def test_zero_polynomials_rejected():
    with pytest.raises(ValueError):
        check_intertwining(TrigPoly2(), TrigPoly2.constant(1), 2, 2)


def test_fuzz_small_is_deterministic_across_workers():
    r1 = fuzz_intertwining(600, seed=7, chunk=100, workers=1)
    r4 = fuzz_intertwining(600, seed=7, chunk=100, workers=4)
    assert r1.trials == 600 and r1.as_dict() == r4.as_dict()
    assert r1.relation_holds > 0 and r1.passed


def test_dump_counterexamples_roundtrip(tmp_path):
    a = TrigPoly2.monomial(1, 1, 2.0)
    b = TrigPoly2.univariate([1, 1], axis=2)
    rep = FuzzReport(1, 1, [(2, 3, a, b)])
    assert not rep.passed and rep.as_dict()["counterexamples"] == 1
    paths = dump_counterexamples(rep, tmp_path / "cx")
    assert len(paths) == 2 and paths[0].endswith("pair0000_2x3_a.txt")
    assert TrigPoly2.from_text(open(paths[0]).read()) == a
    assert TrigPoly2.from_text(open(paths[1]).read()) == b


@given(
    arrays(np.float64, st.integers(1, 12), elements=st.floats(-1e3, 1e3)),
    arrays(np.float64, st.integers(1, 12), elements=st.floats(-1e3, 1e3)),
)
@settings(max_examples=60, deadline=None)
def test_outer_products_score_zero(u, v):
    assert nonseparability_score(np.outer(u, v)) <= 1e-12


def test_outer_product_with_zero_lines():
    u = np.array([0.0, 1.0, 0.0, -2.0])
    v = np.array([3.0, 0.0, 1.0])
    assert separability_certificate(np.outer(u, v))["separable"]
    assert nonseparability_score(np.zeros((3, 3))) == 0.0


def test_rank_two_scores_one():
    assert nonseparability_score(np.eye(2)) == pytest.approx(1.0)
    assert not separability_certificate(np.eye(5))["separable"]


def test_complex_outer_product():
    u = np.exp(1j * np.arange(5))
    v = np.array([1, 2j, -1])
    assert nonseparability_score(np.outer(u, v)) <= 1e-12


def test_tensor_haar_samples():
    x = (np.arange(64) + 0.5) / 64
    phi = (x < 1).astype(float)
    psi = np.where(x < 0.5, 1.0, -1.0)
    assert nonseparability_score(np.outer(psi, phi)) == 0.0
    assert nonseparability_score(np.outer(psi, phi) + np.outer(phi, psi)) > 0.1


def test_subsampled_score_is_lower_bound():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((300, 300))
    assert 0 < nonseparability_score(X, max_lines=16) <= nonseparability_score(X, max_lines=64)


def test_score_requires_matrix():
    with pytest.raises(ValueError):
        nonseparability_score(np.ones(3))
