import numpy as np
import pytest

from birank.filters import commuting_lattice_residual
from birank.lattice import FreqGrid
from birank.meyer import (
    BORDER_I,
    BORDER_J,
    CENTRAL,
    CORNER,
    OUTSIDE,
    MeyerCornerSpec,
    MeyerEvaluator,
    build_profile,
    corner_conditions,
    filter_quotient,
    filter_rows,
    gram_error,
    lattice_residual,
    orthonormality_sum,
    profile_nonseparability,
    solve_corner_values,
    synthesize_wavelet,
    tensor_profile_1d,
    tensor_reference,
    translate_gram,
    verify_bmra,
    wavelet_report,
)

A = 1 / (64 * np.pi**2)
PI2 = 4 * np.pi**2


def test_corner_values_closed_form():
    # with a = d = 1/(64 pi^2): b + c = 7/(32 pi^2), bc = 1/(4096 pi^4)
    b, c = solve_corner_values(A, A)
    assert b == pytest.approx((7 + 4 * np.sqrt(3)) / (64 * np.pi**2), rel=1e-14)
    assert c == pytest.approx((7 - 4 * np.sqrt(3)) / (64 * np.pi**2), rel=1e-12)
    assert abs(b + c + 2 * A - 1 / PI2) <= 1e-15
    assert abs(b * c - A * A) <= 1e-15


def test_corner_values_degenerate_and_symmetric():
    assert solve_corner_values(0.0, 0.0) == pytest.approx((1 / PI2, 0.0))
    assert solve_corner_values(A, 3 * A) == solve_corner_values(3 * A, A)


@pytest.mark.parametrize("a,d", [(1 / (16 * np.pi**2), 1 / (16 * np.pi**2)), (-1e-4, 1e-4)])
def test_corner_values_precondition(a, d):
    with pytest.raises(ValueError):
        solve_corner_values(a, d)


def test_spec_validation():
    with pytest.raises(ValueError, match="positive"):
        MeyerCornerSpec(a=0.0, d=A)
    with pytest.raises(ValueError):
        MeyerCornerSpec(mode="spline")
    with pytest.raises(ValueError):
        MeyerCornerSpec(mode="tensor", p=1.0)
    with pytest.raises(ValueError):
        MeyerCornerSpec(mode="custom")


def test_grid_must_be_commensurate():
    with pytest.raises(ValueError, match="multiple of pi/3"):
        build_profile(MeyerCornerSpec(), FreqGrid(24, 4.0))


def test_regions_and_bounds(meyer_768):
    p = meyer_768
    x1, x2 = p.grid.mesh()
    central = (np.abs(x1) < 2 * np.pi / 3) & (np.abs(x2) < 2 * np.pi / 3)
    assert np.all(p.values[central] == 1 / (2 * np.pi))
    assert np.all(p.tags[central] == CENTRAL)
    assert set(np.unique(p.tags)) <= {OUTSIDE, CENTRAL, CORNER, BORDER_I, BORDER_J}
    assert p.values.min() >= 0 and p.values.max() <= 1 / (2 * np.pi)
    assert 0.99 < p.resolved.mean() < 1


def test_outside_support_is_zero():
    ev = MeyerEvaluator(MeyerCornerSpec())
    v, ok, _ = ev.phi_sq([4 * 10 + 1, 0, -50], [0, 4 * 10 + 3, 3], 10)
    assert v[0] == 0 and v[1] == 0 and ok[0] and ok[1]
    assert v[2] == 0


def test_real_even_profile(meyer_768):
    p = meyer_768
    ok = p.resolved & p.resolved[::-1, ::-1]
    assert np.abs(p.values - p.values[::-1, ::-1])[ok].max() <= 1e-12


def test_orthonormality(meyer_768):
    rep = orthonormality_sum(meyer_768)
    assert rep["max_deviation"] <= 1e-12


def test_orthonormality_detects_perturbation():
    a, (b, c) = A, solve_corner_values(A, A)
    p = build_profile(MeyerCornerSpec(a=a, d=a, b=1.1 * b, c=c, validate=False), FreqGrid(96))
    assert orthonormality_sum(p)["max_deviation"] == pytest.approx(0.1 * b, rel=1e-9)


def test_corner_conditions(meyer_768):
    rep = corner_conditions(meyer_768)
    assert rep["partition_residual"] <= 1e-12 and rep["product_residual"] <= 1e-12


def test_filter_quotient_central_and_zero(meyer_768):
    p = meyer_768
    q = filter_quotient(p, "A")
    D = p.D
    n = p.N[(p.N >= -3 * D) & (p.N < 3 * D)]
    x = n * np.pi / (3 * D)
    X1, X2 = np.meshgrid(x, x, indexing="ij")
    ev = p.evaluator
    N1, N2 = np.meshgrid(n, n, indexing="ij")
    centre = (np.abs(X1) < 2 * np.pi / 3) & (np.abs(X2) < 2 * np.pi / 3)
    num, _ = ev.phi(2 * N1, N2, D)
    assert np.allclose(q["values"][centre], 2 * np.pi * num[centre], atol=1e-12)
    far = np.abs(X1) > 2 * np.pi / 3
    assert np.all(q["values"][far] == 0)
    assert q["periodicity"] <= 1e-10


def test_filter_quotient_vertical_period(meyer_768):
    p = meyer_768
    D = p.D
    ev = p.evaluator
    # I-rectangle above the central square: pi/3 < xi_1 < 2pi/3, 2pi/3 < xi_2 < 4pi/3
    n1 = p.N[(p.N > D) & (p.N < 2 * D)]
    n2 = p.N[(p.N > 2 * D) & (p.N < 4 * D)]
    N1, N2 = np.meshgrid(n1, n2, indexing="ij")
    g = lambda a, b: ev.phi(2 * a, b, D)[0] / ev.phi(a, b, D)[0]  # noqa: E731
    ok = ev.phi(N1, N2, D)[1] & ev.phi(N1, N2 - 6 * D, D)[1]
    assert np.abs(g(N1, N2) - g(N1, N2 - 6 * D))[ok].max() <= 1e-10


@pytest.mark.parametrize(
    "spec",
    [
        MeyerCornerSpec(),
        MeyerCornerSpec(a=A, d=2 * A),
        MeyerCornerSpec(mode="triangular"),
        MeyerCornerSpec(mode="tensor"),
        MeyerCornerSpec(mode="tensor", p=0.2 / (2 * np.pi)),
    ],
    ids=["symmetric", "asymmetric", "triangular", "tensor", "tensor-low"],
)
def test_verify_bmra(spec):
    rep = verify_bmra(build_profile(spec, FreqGrid(384)))
    assert rep["passed"], rep["residuals"]


def test_lattice_residual_detects_broken_product():
    b, c = solve_corner_values(A, A)
    p = build_profile(MeyerCornerSpec(a=b, d=A, b=A, c=c, validate=False), FreqGrid(96))
    assert orthonormality_sum(p)["max_deviation"] <= 1e-12
    assert lattice_residual(p)["max_abs"] > 0.1
    assert not verify_bmra(p)["passed"]


def test_float_filters_match_lattice(meyer_small):
    p = meyer_small
    mA = p.filter_callable("A")
    D = p.D
    pts = np.array([1, 5, 33, -71]) * 4
    v, _ = p.evaluator.filter("A", pts, pts[::-1], D)
    assert np.allclose(mA(pts * np.pi / (3 * D), pts[::-1] * np.pi / (3 * D)), v)
    with pytest.raises(ValueError):
        mA(0.123456, 0.5)


def test_lattice_functional_antisymmetry(meyer_small):
    p = meyer_small
    mA, mB = p.filter_callable("A"), p.filter_callable("B")
    D = p.D
    s = np.pi / (3 * D)
    n = np.arange(-3 * D + 4, 3 * D, 44)
    N1, N2 = np.meshgrid(n, n[::-1], indexing="ij")
    f = commuting_lattice_residual(mA, mB, N1 * s, N2 * s)
    g = commuting_lattice_residual(mA, mB, (N1 + 3 * D) * s, N2 * s)
    assert np.abs(f + g).max() <= 1e-9


def test_tensor_matches_outer_product():
    spec = MeyerCornerSpec(mode="tensor")
    p = build_profile(spec, FreqGrid(384))
    assert np.abs(p.values - tensor_reference(p)).max() <= 1e-12
    assert profile_nonseparability(p) <= 1e-10
    s = np.array([0.5, 2.5, 3.5, -2.5, -3.5, 4.5])
    assert np.allclose(tensor_profile_1d(spec.p, s),
                       [1 / (2 * np.pi), spec.p, 1 / (2 * np.pi) - spec.p, spec.p, 1 / (2 * np.pi) - spec.p, 0])


def test_custom_mode_reproduces_piecewise():
    base = MeyerCornerSpec(a=A, d=2 * A)
    custom = MeyerCornerSpec(mode="custom", corner_fn=lambda n1, n2, D: base.corner_sq(n1, n2, D)[0])
    g = FreqGrid(96)
    assert np.array_equal(build_profile(base, g).values, build_profile(custom, g).values)


def test_nonseparability_scores():
    g = FreqGrid(192)
    assert profile_nonseparability(build_profile(MeyerCornerSpec(a=A, d=2 * A), g)) > 0.1
    assert profile_nonseparability(build_profile(MeyerCornerSpec(mode="triangular"), g)) > 0.1


def test_translate_gram(meyer_768):
    G = translate_gram(meyer_768, 3)
    assert G.shape == (7, 7)
    g0, off = gram_error(G)
    assert g0 <= 1e-3 and off <= 1e-3


def test_gram_converges_on_offset_grids():
    errs = [gram_error(translate_gram(build_profile(MeyerCornerSpec(), FreqGrid(n))))[1] for n in (94, 190, 382)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 2e-3


def test_known_rows_match_dyadic_formulas(meyer_small):
    p = meyer_small
    D = p.D
    ev = p.evaluator
    n = p.N[(p.N > 0) & (p.N < 3 * D)][::5]
    N1, N2 = np.meshgrid(n, n, indexing="ij")
    rows, ok = filter_rows(ev, N1, N2, D)
    # scaling row for 2I is phi(2 eta) / phi(eta)
    num, _ = ev.phi(2 * N1, 2 * N2, D)
    den, _ = ev.phi(N1, N2, D)
    assert np.allclose(rows[..., 0, 0], num / den)
    # A-detail row from the dyadic highpass formula with the B-scaling filter
    s = np.pi / (3 * D)
    mA, mB = p.filter_callable("A"), p.filter_callable("B")
    x1, x2 = N1 * s, N2 * s
    psiA = np.exp(-1j * x1) * np.conj(mA(x1 + np.pi, 2 * x2))
    assert np.allclose(rows[..., 1, 0], psiA * mB(x1, x2))


@pytest.fixture(scope="module")
def wavelet():
    return synthesize_wavelet(build_profile(MeyerCornerSpec(a=A, d=2 * A), FreqGrid(384)))


def test_wavelet_unitary_completion(wavelet):
    assert wavelet.partial_isometry <= 1e-10
    assert wavelet.unitarity <= 1e-10


def test_wavelet_support_and_gap(wavelet):
    assert wavelet.support_box() < 8 * np.pi / 3
    assert wavelet.central_max() <= 1e-12


def test_wavelet_normalized_and_orthogonal(wavelet):
    rep = wavelet_report(wavelet)
    assert rep["norm"] == pytest.approx(1, abs=1e-2)
    assert rep["max_inner_with_scaling_translates"] <= 1e-2


def test_wavelet_spatial_samples(wavelet):
    x, psi = wavelet.spatial(4.0, 9)
    assert psi.shape == (9, 9) and x[4] == 0
    at_zero = np.sum(wavelet.psi_hat) * wavelet.cell_area / (2 * np.pi)
    assert psi[4, 4] == pytest.approx(at_zero)


def test_wavelet_requires_valid_profile():
    b, c = solve_corner_values(A, A)
    p = build_profile(MeyerCornerSpec(a=b, d=A, b=A, c=c, validate=False), FreqGrid(96))
    with pytest.raises(ValueError, match="commuting_lattice"):
        synthesize_wavelet(p)
