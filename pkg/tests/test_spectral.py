import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from graphband import spectral
from graphband.graph import laplacian
from graphband.instances import random_connected_graph
from graphband.spectral import (
    eigendecompose,
    generate_bandlimited,
    gft,
    out_of_band_energy,
    project_bandlimited,
)


def test_small_spectra(p2, triangle):
    np.testing.assert_allclose(eigendecompose(laplacian(p2)).eigenvalues, [0, 2], atol=1e-12)
    np.testing.assert_allclose(eigendecompose(laplacian(triangle)).eigenvalues, [0, 3, 3], atol=1e-12)


def test_cycle4_against_characteristic_polynomial(cycle4):
    lap = laplacian(cycle4)
    roots = sympy.Matrix(lap.astype(int).tolist()).charpoly().all_roots()
    expected = sorted(float(r) for r in roots)
    assert expected == [0.0, 2.0, 2.0, 4.0]
    np.testing.assert_allclose(eigendecompose(lap).eigenvalues, expected, atol=1e-12)


def test_basis_invariants():
    g = random_connected_graph(30, 2)
    lap = laplacian(g)
    b = eigendecompose(lap)
    u, w = b.eigenvectors, b.eigenvalues
    assert np.all(np.diff(w) >= 0) and w[0] >= 0
    assert np.max(np.abs(u.T @ u - np.eye(30))) <= 1e-8
    assert np.max(np.abs(u @ np.diag(w) @ u.T - lap)) <= 1e-7 * np.max(np.abs(lap))


def test_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        eigendecompose(np.array([[1.0, -1.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        eigendecompose(np.ones((2, 3)))


def test_gft_examples(triangle):
    g = random_connected_graph(12, 0)
    b = eigendecompose(laplacian(g))
    np.testing.assert_allclose(gft(b, b.eigenvectors[:, 3]), np.eye(12)[3], atol=1e-12)
    c = gft(b, np.full(12, 2.0))
    np.testing.assert_allclose(c[1:], 0, atol=1e-12)
    assert abs(c[0]) == pytest.approx(2 * np.sqrt(12))
    bt = eigendecompose(laplacian(triangle))
    f = np.array([0.3, -1.2, 2.0])
    direct = np.array([f @ bt.eigenvectors[:, k] for k in range(3)])
    np.testing.assert_allclose(gft(bt, f), direct, atol=1e-14)
    assert np.linalg.norm(gft(bt, f)) == pytest.approx(np.linalg.norm(f), rel=1e-9)
    with pytest.raises(ValueError):
        gft(bt, np.zeros(4))


def test_projection_examples():
    g = random_connected_graph(20, 4)
    b = eigendecompose(laplacian(g))
    space = b.band(b.eigenvalues[6])
    f = generate_bandlimited(space, 1)
    assert np.linalg.norm(project_bandlimited(space, f) - f) <= 1e-9
    k = space.band_indices[-1] + 1
    np.testing.assert_allclose(project_bandlimited(space, b.eigenvectors[:, k]), 0, atol=1e-9)
    full = b.band(b.eigenvalues[-1])
    x = np.random.default_rng(0).standard_normal(20)
    np.testing.assert_allclose(project_bandlimited(full, x), x, atol=1e-9)


def test_band_includes_cutoff_eigenvalue(cycle4):
    b = eigendecompose(laplacian(cycle4))
    # eigenvalue 2 sits exactly on the cutoff, possibly perturbed by roundoff
    assert b.band(2.0).dim == 3
    assert b.band(0.0).dim == 1


def test_generate_bandlimited_contract():
    g = random_connected_graph(25, 9)
    b = eigendecompose(laplacian(g))
    space = b.band(1.0)
    x = generate_bandlimited(space, 42)
    assert np.linalg.norm(x) == pytest.approx(1.0)
    np.testing.assert_allclose(space.project(x), x, atol=1e-12)
    np.testing.assert_array_equal(x, generate_bandlimited(space, 42))
    c = generate_bandlimited(b.band(0.0), 3)
    np.testing.assert_allclose(np.abs(c), 1 / np.sqrt(25), atol=1e-12)


def test_out_of_band_energy():
    g = random_connected_graph(18, 6)
    b = eigendecompose(laplacian(g))
    space = b.band(b.eigenvalues[5])
    assert out_of_band_energy(space, generate_bandlimited(space, 0)) <= 1e-12
    hi = 3 * b.eigenvectors[:, -1]
    assert out_of_band_energy(space, hi) == pytest.approx(9.0)
    # mixed a*u0 + b*u_max with the cutoff between them: Parseval gives b^2
    mixed = 0.7 * b.eigenvectors[:, 0] - 1.5 * b.eigenvectors[:, -1]
    assert out_of_band_energy(space, mixed) == pytest.approx(1.5**2)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(3, 30), seed=st.integers(0, 10**6), frac=st.floats(0.0, 1.0))
def test_projector_properties(n, seed, frac):
    g = random_connected_graph(n, seed)
    lap = laplacian(g)
    b = eigendecompose(lap)
    omega = frac * b.eigenvalues[-1]
    space = b.band(omega)
    p = space.projector()
    x = np.random.default_rng(seed).standard_normal((n, 3))
    np.testing.assert_allclose(p @ (p @ x), p @ x, atol=1e-9)
    np.testing.assert_allclose(p, p.T, atol=1e-9)
    assert np.linalg.norm(p @ x[:, 0]) <= np.linalg.norm(x[:, 0]) + 1e-12
    f = space.project(x[:, 1])
    # <f, P delta_u> = f(u) for bandlimited f
    np.testing.assert_allclose(p @ f, f, atol=1e-9)
    np.testing.assert_allclose(f @ p, f, atol=1e-9)
    # Rayleigh quotient of a bandlimited signal stays below the cutoff
    assert f @ lap @ f <= omega * (f @ f) * (1 + 1e-9) + 1e-12


def test_spectrum_export(tmp_path, triangle):
    b = eigendecompose(laplacian(triangle))
    spectral.write_spectrum(b, tmp_path / "s.csv")
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0] == "index,eigenvalue"
    assert len(lines) == 4
