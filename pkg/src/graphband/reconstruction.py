"""Iterative reconstruction of bandlimited graph signals from vertex samples.

Three methods differ only in how the sampled residual is fed back:

* ILSR projects the residual spikes ``sum_u r(u) delta_u`` directly;
* IWR scales each spike by its cell size and damps by ``1 / (1 + gamma**2)``;
* IPR spreads each residual over its whole local set before projecting.

ILSR and IWR are instances of the generic frame iteration
:func:`frame_iteration`. IPR uses two signal families and is separate.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from . import _kernels
from .graph import Graph, is_connected
from .localsets import (
    GammaValue,
    LocalMeasures,
    LocalSetPartition,
    PartitionError,
    SamplingSet,
    gamma as gamma_value,
    measures as local_measures,
    require_valid,
)
from .spectral import BandlimitedSpace

Method = Literal["ilsr", "iwr", "ipr"]


@dataclass(frozen=True)
class ReconstructionConfig:
    """Run parameters.

    Attributes:
        method: one of ``ilsr``, ``iwr``, ``ipr``.
        omega: the cutoff assumed known a priori. ``None`` means use the
            cutoff of the space passed to the solver.
        max_iterations: cap on the number of updates.
        rel_tol: stop once ``||samples - f_k|_S|| / ||samples||`` falls to this.
        track_truth: optional reference signal for error curves.
        q_source: ``"tilde"`` takes gamma from the cheap bound Q_tilde_max,
            ``"exact"`` from Q_max.
    """

    method: Method = "ipr"
    omega: float | None = None
    max_iterations: int = 1000
    rel_tol: float = 1e-9
    track_truth: np.ndarray | None = field(default=None, repr=False, compare=False)
    q_source: Literal["tilde", "exact"] = "tilde"

    def __post_init__(self):
        if self.method not in ("ilsr", "iwr", "ipr"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.q_source not in ("tilde", "exact"):
            raise ValueError(f"unknown q_source {self.q_source!r}")


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """Outcome of one run.

    ``errors``, ``residuals`` and ``bounds`` all have ``iterations + 1``
    entries, index 0 describing the initial estimate. ``errors`` and
    ``bounds`` are relative to ``||truth||`` and are empty without a truth
    signal; a bound entry is ``None`` when no guarantee applies.
    """

    method: str
    omega: float
    gamma: float | None
    guaranteed: bool
    final_signal: np.ndarray
    iterations: int
    termination: Literal["converged", "max_iter"]
    errors: list
    residuals: list
    bounds: list
    rate: float | None = None
    iterates: list | None = field(default=None, repr=False)

    def iterations_to(self, level: float) -> int | None:
        """First iteration whose relative error is at most ``level``."""
        for k, e in enumerate(self.errors):
            if e <= level:
                return k
        return None

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "omega": self.omega,
            "gamma": self.gamma,
            "guaranteed": self.guaranteed,
            "rate": self.rate,
            "iterations": self.iterations,
            "termination": self.termination,
            "errors": list(self.errors),
            "bounds": list(self.bounds),
            "residuals": list(self.residuals),
        }


def _check_space(space: BandlimitedSpace, cfg: ReconstructionConfig) -> None:
    if cfg.omega is not None and not math.isclose(cfg.omega, space.cutoff, rel_tol=1e-12, abs_tol=1e-15):
        raise ValueError(f"config omega {cfg.omega} differs from the space cutoff {space.cutoff}")


def _check_samples(samples, s: SamplingSet) -> np.ndarray:
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.shape[0] != len(s):
        raise ValueError(f"{samples.shape[0]} samples for a sampling set of size {len(s)}")
    if not np.all(np.isfinite(samples)):
        raise ValueError("samples must be finite")
    return samples


def _check_partition(p: LocalSetPartition, n: int, graph: Graph | None) -> None:
    if p.n_vertices != n:
        raise PartitionError(f"partition covers {p.n_vertices} vertices, space has {n}")
    if graph is not None:
        require_valid(graph, p)
        return
    # without the graph only the set axioms can be checked
    total = sum(len(c) for c in p.cells.values())
    owner = p.owner
    if total != n or (owner < 0).any() or any(owner[u] != u for u in p.cells):
        raise PartitionError("cells must be disjoint, cover every vertex and contain their owner")


def resolve_gamma(
    p: LocalSetPartition,
    omega: float,
    *,
    graph: Graph | None = None,
    local: LocalMeasures | None = None,
    gamma: float | None = None,
    q_source: str = "tilde",
) -> GammaValue:
    """Gamma for a partition: explicit value, else from measures, else from the graph."""
    if gamma is not None:
        return GammaValue(float(gamma), float(gamma) < 1.0)
    if local is None:
        if graph is None:
            raise ValueError("IWR/IPR need the graph, precomputed measures or an explicit gamma")
        local = local_measures(graph, p)
    q = local.Q_tilde_max if q_source == "tilde" else local.Q_max
    return gamma_value(q, omega)


class _Tracker:
    def __init__(self, space, s, samples, cfg, factor, keep_iterates):
        self.s = s
        self.samples = samples
        self.cfg = cfg
        self.factor = factor
        self.snorm = float(np.linalg.norm(samples))
        self.truth = None if cfg.track_truth is None else np.asarray(cfg.track_truth, dtype=float)
        if self.truth is not None and self.truth.shape[0] != space.n:
            raise ValueError("truth signal has the wrong length")
        self.tnorm = None if self.truth is None else (float(np.linalg.norm(self.truth)) or 1.0)
        self.errors, self.residuals, self.bounds = [], [], []
        self.iterates = [] if keep_iterates else None

    def record(self, f: np.ndarray) -> float:
        r = float(np.linalg.norm(self.samples - f[self.s.members]))
        rel = r / self.snorm if self.snorm > 0 else r
        self.residuals.append(rel)
        if self.truth is not None:
            err = float(np.linalg.norm(f - self.truth)) / self.tnorm
            if not self.errors:
                self.err0 = err
            k = len(self.errors)
            self.errors.append(err)
            self.bounds.append(None if self.factor is None else self.err0 * self.factor**k)
        if self.iterates is not None:
            self.iterates.append(f.copy())
        return rel


def _run(space, s, samples, cfg, inject, f0, factor, method, gamma, guaranteed, keep_iterates):
    """Drive ``f_{k+1} = f_k + inject(samples - f_k|_S)`` until the stop rule fires."""
    tr = _Tracker(space, s, samples, cfg, factor, keep_iterates)
    f = f0
    tr.record(f)
    k = 0
    termination = "max_iter"
    if tr.snorm == 0:
        termination = "converged"
    else:
        while k < cfg.max_iterations:
            f = f + inject(samples - f[s.members])
            k += 1
            if tr.record(f) <= cfg.rel_tol:
                termination = "converged"
                break
    return ReconstructionReport(
        method=method,
        omega=float(space.cutoff),
        gamma=gamma,
        guaranteed=guaranteed,
        final_signal=f,
        iterations=k,
        termination=termination,
        errors=tr.errors,
        residuals=tr.residuals,
        bounds=tr.bounds,
        rate=factor,
        iterates=tr.iterates,
    )


def local_propagation(space: BandlimitedSpace, p: LocalSetPartition, samples) -> np.ndarray:
    """Copy each sample over its local set, then project onto the band."""
    s = p.sampling_set
    samples = _check_samples(samples, s)
    col = np.searchsorted(s.members, p.owner)
    if (p.owner < 0).any() or not np.array_equal(s.members[np.minimum(col, len(s) - 1)], p.owner):
        raise PartitionError("partition does not cover every vertex")
    return space.project(samples[col])


def frame_iteration(
    space: BandlimitedSpace,
    s: SamplingSet,
    weights,
    mu: float,
    samples,
    cfg: ReconstructionConfig,
    *,
    rate: float | None = None,
    keep_iterates: bool = False,
    method: str = "frame",
) -> ReconstructionReport:
    """Generic frame iteration ``f_{k+1} = f_k + mu * P(sum_u w_u r_k(u) delta_u)``.

    The frame operator of ``{sqrt(w_u) P(delta_u)}`` only needs sampled values
    of the error on bandlimited inputs, so the update uses the sampled residual
    ``r_k = samples - f_k|_S``. The initial estimate is one step from zero.

    Args:
        weights: per-sample frame weights ``w_u`` aligned with ``s.members``.
        mu: step size; 0 yields stationary iterates and a warning.
        rate: contraction factor of ``I - mu S`` if known; fills ``bounds``.

    Raises:
        ValueError: negative step size.
    """
    _check_space(space, cfg)
    samples = _check_samples(samples, s)
    w = np.broadcast_to(np.asarray(weights, dtype=float), samples.shape)
    if mu < 0:
        raise ValueError(f"step size must be nonnegative, got {mu}")
    if mu == 0:
        warnings.warn("step size 0: iterates are stationary", RuntimeWarning, stacklevel=2)
    n = space.n
    members = s.members
    scale = mu * w

    def inject(r):
        spikes = np.zeros(n)
        spikes[members] = scale * r
        return space.project(spikes)

    f0 = inject(samples)
    return _run(space, s, samples, cfg, inject, f0, rate, method, None, rate is not None and rate < 1,
                keep_iterates)


def ilsr(space: BandlimitedSpace, s: SamplingSet, samples, cfg: ReconstructionConfig,
         *, local: LocalMeasures | None = None, keep_iterates: bool = False) -> ReconstructionReport:
    """Iterative least-squares reconstruction.

    When local measures are supplied and the contraction condition holds, the
    bound trace uses the frame bounds ``[(1-gamma)^2 / N_max, 1]`` of the
    plain lowpass-delta frame, i.e. rate ``1 - (1-gamma)^2 / N_max``.
    """
    rate = None
    g = None
    ok = False
    if local is not None:
        q = local.Q_tilde_max if cfg.q_source == "tilde" else local.Q_max
        g, ok = gamma_value(q, space.cutoff, warn=False)
        if ok:
            rate = 1.0 - (1.0 - g) ** 2 / local.N_max
    rep = frame_iteration(space, s, 1.0, 1.0, samples, cfg, rate=rate, keep_iterates=keep_iterates,
                          method="ilsr")
    return _replace_gamma(rep, g, ok)


def _replace_gamma(rep, g, ok):
    return replace(rep, gamma=g, guaranteed=ok)


def iwr(space: BandlimitedSpace, p: LocalSetPartition, samples, cfg: ReconstructionConfig, *,
        graph: Graph | None = None, local: LocalMeasures | None = None, gamma: float | None = None,
        keep_iterates: bool = False) -> ReconstructionReport:
    """Iterative weighting reconstruction.

    Weights each sampled residual by its cell size and steps by
    ``1 / (1 + gamma**2)``. Under the contraction condition the error decays
    at least like ``(2 gamma / (1 + gamma**2))**k``. When the condition fails
    the method still runs and the bound trace is ``None``.
    """
    _check_space(space, cfg)
    _check_partition(p, space.n, graph)
    gv = resolve_gamma(p, space.cutoff, graph=graph, local=local, gamma=gamma, q_source=cfg.q_source)
    mu = 1.0 / (1.0 + gv.gamma**2)
    rate = 2 * gv.gamma / (1 + gv.gamma**2) if gv.guaranteed else None
    rep = frame_iteration(space, p.sampling_set, p.sizes, mu, samples, cfg, rate=rate,
                          keep_iterates=keep_iterates, method="iwr")
    return _replace_gamma(rep, gv.gamma, gv.guaranteed)


def ipr(space: BandlimitedSpace, p: LocalSetPartition, samples, cfg: ReconstructionConfig, *,
        graph: Graph | None = None, local: LocalMeasures | None = None, gamma: float | None = None,
        keep_iterates: bool = False) -> ReconstructionReport:
    """Iterative propagating reconstruction.

    Each sampled residual is copied over its local set before projection.
    Under the contraction condition the error decays at least like ``gamma**k``.
    """
    _check_space(space, cfg)
    _check_partition(p, space.n, graph)
    gv = resolve_gamma(p, space.cutoff, graph=graph, local=local, gamma=gamma, q_source=cfg.q_source)
    s = p.sampling_set
    samples = _check_samples(samples, s)
    col = np.searchsorted(s.members, p.owner)

    def inject(r):
        return space.project(r[col])

    f0 = inject(samples)
    return _run(space, s, samples, cfg, inject, f0, gv.gamma if gv.guaranteed else None, "ipr",
                gv.gamma, gv.guaranteed, keep_iterates)


def reconstruct(space: BandlimitedSpace, p: LocalSetPartition, samples, cfg: ReconstructionConfig,
                **kwargs) -> ReconstructionReport:
    """Dispatch on ``cfg.method``."""
    if cfg.method == "ilsr":
        local = kwargs.get("local")
        if local is None and kwargs.get("graph") is not None:
            local = local_measures(kwargs["graph"], p)
        return ilsr(space, p.sampling_set, samples, cfg, local=local,
                    keep_iterates=kwargs.get("keep_iterates", False))
    fn = iwr if cfg.method == "iwr" else ipr
    return fn(space, p, samples, cfg, **kwargs)


def add_observation_noise(samples, snr_db: float, seed) -> np.ndarray:
    """Add white Gaussian noise rescaled to hit ``snr_db`` exactly.

    Raises:
        ValueError: zero-norm samples or non-finite SNR.
    """
    samples = np.asarray(samples, dtype=float)
    if not math.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    p_sig = float(np.sum(samples**2))
    if p_sig == 0:
        raise ValueError("cannot set an SNR for zero-norm samples")
    noise = np.random.default_rng(seed).standard_normal(samples.shape)
    noise *= math.sqrt(p_sig / 10 ** (snr_db / 10) / float(np.sum(noise**2)))
    return samples + noise


def realized_snr_db(clean, noisy) -> float:
    clean = np.asarray(clean, dtype=float)
    noise = np.asarray(noisy, dtype=float) - clean
    return 10 * math.log10(float(np.sum(clean**2)) / float(np.sum(noise**2)))


def eigenvalue_lower_bound(g: Graph) -> float:
    """Lower bound ``max_u 1 / (K(u) R(u))`` on the smallest positive Laplacian eigenvalue.

    K and R are taken over the whole graph rooted at each vertex.

    Raises:
        ValueError: the graph is disconnected or has fewer than two vertices.
    """
    if g.n_vertices < 2 or not is_connected(g):
        raise ValueError("eigenvalue bound needs a connected graph with at least two vertices")
    labels = np.zeros(g.n_vertices, dtype=np.int64)
    best = 0.0
    for u in range(g.n_vertices):
        k, r, _ = _kernels.spt_measures(g.indptr, g.indices, labels, 0, u)
        best = max(best, 1.0 / (k * r))
    return best
