"""Laplacian spectrum, graph Fourier transform and bandlimited projection."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.linalg

#: Eigenvalues within this distance below zero are clamped to zero.
NEG_CLAMP = 1e-9
#: Band membership slack: ``lambda_k <= omega + BAND_EPS``.
BAND_EPS = 1e-12


class SpectralError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])

    def band(self, omega: float) -> BandlimitedSpace:
        return BandlimitedSpace(self, float(omega))


def eigendecompose(lap: np.ndarray, sym_tol: float = 1e-10) -> SpectralBasis:
    """Full symmetric eigendecomposition of a Laplacian.

    Raises:
        ValueError: ``lap`` is not square or not symmetric within ``sym_tol``.
        SpectralError: the LAPACK driver failed or returned a negative eigenvalue.
    """
    lap = np.asarray(lap, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {lap.shape}")
    if lap.size and np.max(np.abs(lap - lap.T)) > sym_tol:
        raise ValueError("matrix is not symmetric")
    try:
        w, u = scipy.linalg.eigh(0.5 * (lap + lap.T))
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigensolver failed: {exc}") from exc
    if w.size and w[0] < -NEG_CLAMP:
        raise SpectralError(f"negative eigenvalue {w[0]:.3e}; input is not a Laplacian")
    w = np.where(w < 0, 0.0, w)
    w.setflags(write=False)
    u.setflags(write=False)
    return SpectralBasis(w, u)


@dataclass(frozen=True, eq=False)
class BandlimitedSpace:
    """Paley-Wiener space of signals supported on frequencies ``<= cutoff``."""

    basis: SpectralBasis
    cutoff: float

    def __post_init__(self):
        if not self.cutoff >= 0:
            raise ValueError(f"cutoff must be nonnegative, got {self.cutoff}")

    @cached_property
    def band_indices(self) -> np.ndarray:
        return np.flatnonzero(self.basis.eigenvalues <= self.cutoff + BAND_EPS)

    @cached_property
    def band_vectors(self) -> np.ndarray:
        """Eigenvectors spanning the band, one per column."""
        return np.ascontiguousarray(self.basis.eigenvectors[:, self.band_indices])

    @property
    def dim(self) -> int:
        return int(self.band_indices.shape[0])

    @property
    def n(self) -> int:
        return self.basis.n

    def project(self, f: np.ndarray) -> np.ndarray:
        """Apply the projector to a signal or to each column of a matrix."""
        ub = self.band_vectors
        return ub @ (ub.T @ f)

    def projector(self) -> np.ndarray:
        ub = self.band_vectors
        return ub @ ub.T


def _check_dim(n: int, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape[0] != n:
        raise ValueError(f"signal has length {f.shape[0]}, graph has {n} vertices")
    return f


def gft(basis: SpectralBasis, f) -> np.ndarray:
    """Graph Fourier coefficients ``U^T f``."""
    f = _check_dim(basis.n, f)
    return basis.eigenvectors.T @ f


def igft(basis: SpectralBasis, coeffs) -> np.ndarray:
    coeffs = _check_dim(basis.n, coeffs)
    return basis.eigenvectors @ coeffs


def project_bandlimited(space: BandlimitedSpace, f) -> np.ndarray:
    return space.project(_check_dim(space.n, f))


def generate_bandlimited(space: BandlimitedSpace, seed) -> np.ndarray:
    """Unit-norm projection of an i.i.d. standard normal draw onto the band."""
    rng = np.random.default_rng(seed)
    g = space.project(rng.standard_normal(space.n))
    return g / np.linalg.norm(g)


def out_of_band_energy(space: BandlimitedSpace, f) -> float:
    """Energy carried by frequencies strictly above the cutoff."""
    f = _check_dim(space.n, f)
    fhat = gft(space.basis, f)
    mask = np.ones(space.n, dtype=bool)
    mask[space.band_indices] = False
    return float(np.sum(fhat[mask] ** 2))


def write_spectrum(basis: SpectralBasis, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "eigenvalue"])
        for i, lam in enumerate(basis.eigenvalues.tolist()):
            w.writerow([i, repr(lam)])
