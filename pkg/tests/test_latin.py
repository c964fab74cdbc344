import itertools

import numpy as np
import pytest

from birank.latin import (
    haar_family,
    latex_family,
    latex_grid,
    latin_square_family,
    radical_factor,
    read_family_csv,
    verify_family,
)

R10 = np.sqrt(10)
R15 = np.sqrt(15)

# triadic wavelet grids, rows indexed by i and columns by j
PSI = {
    1: R10 / 30 * np.array([[5, -1, -4], [-4, -1, 5], [-1, 2, -1]]),
    2: R15 / 30 * np.array([[0, -1, 1], [-4, 4, 0], [4, -3, -1]]),
    3: R15 / 30 * np.array([[2, -5, 3], [0, 2, -2], [-2, 3, -1]]),
    4: R10 / 10 * np.array([[1, 0, -1], [0, 1, -1], [-1, -1, 2]]),
}


def test_triadic_wavelet_grids():
    fam = latin_square_family()
    for k, g in PSI.items():
        assert np.allclose(fam.wavelets[k - 1], g, atol=1e-15)


def test_triadic_detail_rows():
    fam = latin_square_family()
    UA = np.array([[1, 1, 1], [1, 1, -2], [1, -1, 0]]) / np.array([[np.sqrt(3)], [np.sqrt(6)], [np.sqrt(2)]])
    for i in (1, 2):
        assert np.allclose(fam.detail_a[i - 1], np.outer(UA[i], UA[0]))
        assert np.allclose(fam.detail_b[i - 1], np.outer(UA[0], UA[i]))
    assert np.allclose(fam.scaling, 1 / 3)


def test_triadic_orthogonal_squares():
    fam = latin_square_family()
    for p, q in itertools.combinations(fam.wavelets, 2):
        assert abs(np.sum(p * q)) <= 1e-12
    for w in fam.wavelets:
        assert np.sum(w * w) == pytest.approx(1, abs=1e-14)


def test_function_normalization():
    fam = latin_square_family()
    # tiles have area 1/9, so the L2 norm of the function is the grid norm
    c = fam.function_coefficients(fam.wavelets[3])
    assert np.sum(c**2) / 9 == pytest.approx(1)


def test_haar_checkerboard():
    fam = haar_family(2, 2)
    assert len(fam.wavelets) == 1
    w = fam.wavelets[0]
    assert np.allclose(np.abs(w), 0.5)
    assert np.allclose(w, w[0, 0] * np.array([[1, -1], [-1, 1]]))


@pytest.mark.parametrize("alpha,beta", list(itertools.product(range(2, 6), repeat=2)))
def test_generic_family(alpha, beta):
    fam = haar_family(alpha, beta)
    M = fam.matrix
    assert np.abs(M @ M.T - np.eye(alpha * beta)).max() <= 1e-12
    assert len(fam.wavelets) == (alpha - 1) * (beta - 1)
    for g in fam.detail_a:
        assert np.allclose(g, np.outer(g[:, 0], np.ones(beta)))
    for g in fam.detail_b:
        assert np.allclose(g, np.outer(np.ones(alpha), g[0]))
    for w in fam.wavelets:
        assert abs(w.sum()) <= 1e-12
        assert np.abs(w.sum(axis=1)).max() <= 1e-12
    assert verify_family(fam)["passed"]


def test_pinned_family():
    assert np.allclose(haar_family(3, 3, pinned=True).matrix, latin_square_family().matrix)
    assert not np.allclose(haar_family(3, 3).matrix, latin_square_family().matrix)


def test_invalid_pair():
    with pytest.raises(ValueError, match="alpha must be >= 2"):
        haar_family(1, 3)


def test_filters_have_family_coset_matrix():
    from birank.filters import coset_matrix
    from birank.lattice import DilationPair

    fam = haar_family(2, 3)
    C = coset_matrix(fam.filters(), DilationPair(2, 3))
    assert np.allclose(C(0.3, -2.0), fam.matrix)


def test_verify_detects_tampering():
    fam = latin_square_family()
    M = fam.matrix
    M[6, 0] += 1e-6
    bad = type(fam).from_matrix(3, 3, M)
    rep = verify_family(bad)
    assert not rep["passed"]
    assert not rep["checks"]["orthogonality"]["passed"]


def test_radical_factor():
    p, r, q, V = radical_factor(PSI[1])
    assert (p, r, q) == (1, 10, 30)
    assert V.tolist() == [[5, -1, -4], [-4, -1, 5], [-1, 2, -1]]
    assert radical_factor(np.full((2, 2), 0.5))[:3] == (1, 1, 2)


def test_latex_text():
    s = latex_grid("psi_4", PSI[4])
    assert s == r"psi_4 = \frac{\sqrt{10}}{10}\left(\chi_{00} - \chi_{02} + \chi_{11} - \chi_{12} - \chi_{20} - \chi_{21} + 2\chi_{22}\right)"
    assert latex_family(latin_square_family()).count("\n") == 9


def test_csv_reader(tmp_path):
    fam = latin_square_family()
    path = tmp_path / "fam.csv"
    with open(path, "w") as fh:
        fh.write("name," + ",".join(f"g{i}{j}" for i in range(3) for j in range(3)) + "\n")
        for n, g in zip(fam.names, fam.grids):
            fh.write(n + "," + ",".join(repr(float(x)) for x in g.reshape(-1)) + "\n")
    assert np.array_equal(read_family_csv(path).matrix, fam.matrix)
