import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from birank.latin import haar_family, latin_square_family
from birank.transform import BiscaledHaarTransform, SubbandTree, analyze, synthesize, threshold


def test_constant_input():
    fam = latin_square_family()
    x = np.full((27, 27), 2.5)
    t = analyze(x, fam, 3)
    for lv in t.levels:
        for b in lv.bands:
            assert np.abs(b).max() <= 1e-12
    assert np.allclose(t.approx, 2.5 * 9 ** 1.5)


def test_single_tile_pattern():
    fam = latin_square_family()
    x = np.zeros((9, 9))
    x[3:6, 6:9] = fam.wavelets[3]
    t = analyze(x, fam, 1)
    w4 = t.levels[0].wavelet[3]
    assert w4[1, 2] == pytest.approx(1)
    w4 = w4.copy()
    w4[1, 2] = 0
    others = [b for b in t.levels[0].bands] + [t.approx]
    others[-2] = w4
    assert max(np.abs(b).max() for b in others) <= 1e-12


def test_roundtrip_27(rng):
    fam = latin_square_family()
    x = rng.normal(size=(27, 27))
    t = analyze(x, fam, 3)
    assert t.coefficient_count() == x.size
    assert np.abs(synthesize(t, fam) - x).max() <= 1e-10 * np.abs(x).max()
    assert t.energy() == pytest.approx(np.sum(x**2), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2), st.integers(1, 2), st.integers(1, 2),
       st.integers(0, 2**32 - 1))
def test_roundtrip_property(alpha, beta, depth, m, n, seed):
    fam = haar_family(alpha, beta)
    x = np.random.default_rng(seed).normal(size=(m * alpha**depth, n * beta**depth))
    t = analyze(x, fam, depth)
    assert np.abs(synthesize(t, fam) - x).max() <= 1e-10 * max(1.0, np.abs(x).max())
    assert t.energy() == pytest.approx(np.sum(x**2), rel=1e-10)


def test_indivisible_shape():
    with pytest.raises(ValueError, match=r"not divisible by \(3\^2, 3\^2\) = \(9, 9\)"):
        analyze(np.zeros((18, 12)), latin_square_family(), 2)


def test_constant_tree_synthesis():
    fam = haar_family(2, 3)
    t = analyze(np.zeros((4, 9)), fam, 2)
    t.approx[:] = 6.0
    assert np.allclose(synthesize(t, fam), 1.0)


def test_threshold_parseval(rng):
    fam = latin_square_family()
    # smooth image plus noise stands in for a natural image
    u = np.linspace(0, 1, 81)
    x = np.outer(np.sin(3 * u), np.cos(2 * u)) + 0.05 * rng.normal(size=(81, 81))
    t = analyze(x, fam, 2)
    kept, frac = threshold(t, 0.05)
    y = synthesize(kept, fam)
    dropped = t.energy() - kept.energy()
    assert np.sum((x - y) ** 2) == pytest.approx(dropped, rel=1e-9)
    assert 0 < frac < 1


def test_family_mismatch(rng):
    t = analyze(rng.normal(size=(6, 6)), haar_family(2, 2), 1)
    with pytest.raises(ValueError):
        synthesize(t, haar_family(2, 3))


def test_flatten_roundtrip(rng):
    fam = haar_family(2, 3)
    t = analyze(rng.normal(size=(8, 18)), fam, 2)
    back = SubbandTree.unflatten(t.flatten(), 2, 3, (8, 18), 2)
    assert np.array_equal(synthesize(back, fam), synthesize(t, fam))


def test_estimator_api(rng):
    X = rng.normal(size=(5, 81))
    est = BiscaledHaarTransform(depth=2)
    assert est.get_params()["alpha"] == 3
    C = est.fit_transform(X)
    assert C.shape == X.shape
    assert np.allclose(est.inverse_transform(C), X, atol=1e-12)
    assert np.allclose(np.sum(C**2, axis=1), np.sum(X**2, axis=1))
    other = clone(est).set_params(alpha=3, beta=3, depth=1)
    assert other.depth == 1 and not hasattr(other, "family_")


def test_estimator_validation(rng):
    est = BiscaledHaarTransform(alpha=2, beta=3, depth=1, image_shape=(4, 6))
    with pytest.raises(NotFittedError):
        est.transform(np.zeros((1, 24)))
    with pytest.raises(ValueError):
        est.fit(np.zeros((2, 25)))
    with pytest.raises(ValueError):
        BiscaledHaarTransform(depth=1).fit(np.zeros((2, 12)))
    est.fit(np.zeros((2, 24)))
    with pytest.raises(ValueError):
        est.transform(np.zeros((1, 23)))
    with pytest.raises(ValueError):
        est.fit(np.array([[np.nan] * 24]))


def test_estimator_in_pipeline(rng):
    X = rng.normal(size=(3, 36))
    pipe = make_pipeline(BiscaledHaarTransform(alpha=2, beta=3, depth=1, image_shape=(6, 6)))
    C = pipe.fit_transform(X)
    assert C.shape == (3, 36)
    assert np.allclose(pipe.inverse_transform(C), X)
