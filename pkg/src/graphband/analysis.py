"""Numerical certificates for the local-set frames and the propagation contraction.

Everything is computed on the band-restricted matrices (coordinates in the
eigenvectors spanning the band) with dense LAPACK decompositions, so the
measured values carry no iterative-solver slack.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .graph import Graph
from .localsets import LocalMeasures, LocalSetPartition, condition_holds, measures
from .spectral import BandlimitedSpace

FrameKind = Literal["lowpass_delta", "weighted_lowpass_delta", "local_set_indicator"]
FRAME_KINDS = ("lowpass_delta", "weighted_lowpass_delta", "local_set_indicator")

#: Slack allowed when comparing measured and theoretical bounds.
CERT_SLACK = 1e-9

_CLI_ALIASES = {"delta": "lowpass_delta", "weighted": "weighted_lowpass_delta", "indicator": "local_set_indicator"}


def frame_kind(name: str) -> str:
    kind = _CLI_ALIASES.get(name, name)
    if kind not in FRAME_KINDS:
        raise ValueError(f"unknown frame kind {name!r}")
    return kind


@dataclass(frozen=True, eq=False)
class FrameSpec:
    """One of the three frame families attached to a partition.

    * ``lowpass_delta``: ``P(delta_u)``
    * ``weighted_lowpass_delta``: ``sqrt(|N(u)|) P(delta_u)``
    * ``local_set_indicator``: ``P(delta_{N(u)})``
    """

    kind: FrameKind
    partition: LocalSetPartition
    space: BandlimitedSpace

    def __post_init__(self):
        object.__setattr__(self, "kind", frame_kind(self.kind))


@dataclass(frozen=True)
class OperatorCertificate:
    measured_lower: float
    measured_upper: float
    theoretical_lower: float
    theoretical_upper: float
    satisfied: bool
    hypothesis_holds: bool = True
    gamma: float | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


class StepSize(NamedTuple):
    mu: float
    factor: float


def _band_rows(space: BandlimitedSpace, vertices) -> np.ndarray:
    if space.dim == 0:
        raise ValueError("band is empty")
    return space.band_vectors[np.asarray(vertices)]


def frame_coefficient_matrix(spec: FrameSpec) -> np.ndarray:
    """Rows are the frame elements in band coordinates (``|S| x dim``)."""
    p, space = spec.partition, spec.space
    members = p.sampling_set.members
    if spec.kind == "local_set_indicator":
        if space.dim == 0:
            raise ValueError("band is empty")
        return p.indicator_matrix().T @ space.band_vectors
    rows = _band_rows(space, members)
    if spec.kind == "weighted_lowpass_delta":
        rows = rows * np.sqrt(p.sizes)[:, None]
    return rows


def frame_operator_matrix(spec: FrameSpec) -> np.ndarray:
    """``U_band^T (sum_i g_i g_i^T) U_band`` for the frame elements ``g_i``."""
    b = frame_coefficient_matrix(spec)
    m = b.T @ b
    return 0.5 * (m + m.T)


def theoretical_frame_bounds(kind: str, gamma: float, n_max: int) -> tuple[float, float]:
    """Lower and upper frame bounds valid under the contraction condition."""
    kind = frame_kind(kind)
    lo = (1.0 - gamma) ** 2
    if kind == "lowpass_delta":
        return lo / n_max, 1.0
    if kind == "weighted_lowpass_delta":
        return lo, (1.0 + gamma) ** 2
    return lo, float(n_max)


def certify_frame_bounds(spec: FrameSpec, graph: Graph | None = None, local: LocalMeasures | None = None,
                         q_source: str = "exact") -> OperatorCertificate:
    """Compare the extreme eigenvalues of the frame operator with the tabulated bounds.

    Outside the hypothesis ``omega < 1/Q^2`` the certificate is still filled in
    but ``hypothesis_holds`` is False and the theoretical bounds are meaningless.
    """
    if local is None:
        if graph is None:
            raise ValueError("need the graph or precomputed local measures")
        local = measures(graph, spec.partition)
    q = local.Q_max if q_source == "exact" else local.Q_tilde_max
    omega = spec.space.cutoff
    ok = condition_holds(q, omega)
    gam = q * np.sqrt(omega) if q else 0.0
    ev = np.linalg.eigvalsh(frame_operator_matrix(spec))
    lo, hi = float(ev[0]), float(ev[-1])
    t_lo, t_hi = theoretical_frame_bounds(spec.kind, gam, local.N_max)
    sat = t_lo <= lo + CERT_SLACK and hi <= t_hi + CERT_SLACK
    return OperatorCertificate(lo, hi, t_lo, t_hi, bool(sat), ok, float(gam))


def propagation_matrix(space: BandlimitedSpace, p: LocalSetPartition, form: str = "propagate") -> np.ndarray:
    """Local propagation as an ``n x n`` matrix acting on full signals.

    ``form="propagate"`` spreads samples over cells and then projects;
    ``form="sum"`` adds up the projected cell indicators ``P(delta_{N(u)})``
    weighted by the samples. Both give the same operator.
    """
    n = space.n
    members = p.sampling_set.members
    ind = p.indicator_matrix()
    if form == "propagate":
        spread = np.zeros((n, n))
        spread[:, members] = ind
        return space.project(spread)
    if form == "sum":
        g = np.zeros((n, n))
        projected = space.project(ind)
        for j, u in enumerate(members.tolist()):
            g[:, u] += projected[:, j]
        return g
    raise ValueError(f"unknown form {form!r}")


def contraction_matrix(space: BandlimitedSpace, p: LocalSetPartition) -> np.ndarray:
    """``I - G`` in band coordinates."""
    if space.dim == 0:
        raise ValueError("band is empty")
    ub = space.band_vectors
    members = p.sampling_set.members
    g = ub.T @ (p.indicator_matrix() @ ub[members])
    return np.eye(space.dim) - g


def contraction_norm(space: BandlimitedSpace, p: LocalSetPartition) -> float:
    """Spectral norm of ``I - G`` restricted to the band."""
    return float(np.linalg.norm(contraction_matrix(space, p), 2))


def weighted_iteration_matrix(space: BandlimitedSpace, p: LocalSetPartition, weights, mu: float) -> np.ndarray:
    """``I - mu S_w`` in band coordinates for the frame ``{sqrt(w_u) P(delta_u)}``."""
    rows = _band_rows(space, p.sampling_set.members)
    s_w = rows.T @ (np.asarray(weights, dtype=float)[:, None] * rows)
    return np.eye(space.dim) - mu * s_w


def optimal_step_size(cert: OperatorCertificate) -> StepSize:
    """Step ``2 / (A + B)`` from the measured bounds and its factor ``(B - A) / (B + A)``."""
    a, b = cert.measured_lower, cert.measured_upper
    if a + b <= 0:
        raise ValueError("degenerate frame bounds A = B = 0")
    return StepSize(2.0 / (a + b), (b - a) / (b + a))
