"""Desk-scale reproductions of the reconstruction experiments.

Each runner returns a :class:`Table` (column names plus rows) and a summary
dict; :func:`run_experiment` writes the CSVs and a provenance manifest.
Curves always run the full ``max_iterations`` so every curve CSV has
``max_iterations + 1`` rows. CSVs start with a ``# rows: N`` comment line.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import typing
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .graph import Graph, largest_component, laplacian, load_edge_list, minnesota, minnesota_path
from .localsets import (
    CoverageError,
    GuaranteeVoidWarning,
    LocalMeasures,
    LocalSetPartition,
    greedy_one_hop,
    measures,
    random_sampling_set,
    voronoi_partition,
)
from .reconstruction import ReconstructionConfig, add_observation_noise, reconstruct
from .spectral import BandlimitedSpace, SpectralBasis, eigendecompose, generate_bandlimited

log = logging.getLogger(__name__)

METHODS = ("ilsr", "iwr", "ipr")
EXPERIMENTS = ("convergence", "geometry", "cutoff_mismatch", "bound_sweep", "noise", "approx_bandlimited")
#: Relative-error level used for iterations-to-accuracy and sweep success.
TARGET_ERROR = 1e-3
#: Number of trailing iterations averaged into the steady-state error.
STEADY_WINDOW = 10
# effectively disables the residual stop so curves have a fixed length
_NO_STOP = 1e-300


@dataclass
class ExperimentConfig:
    """Flat experiment configuration; keys mirror the config-file keys."""

    experiment: str = "convergence"
    graph: str = "minnesota"
    largest_component: bool = True
    seeds: list[int] = field(default_factory=lambda: [0])
    omegas: list[float] = field(default_factory=lambda: [0.25])
    snr_db: list[float] = field(default_factory=lambda: [10.0, 20.0, 30.0])
    out_of_band: list[float] = field(default_factory=lambda: [0.0, 0.001, 0.01, 0.1])
    sweep_factors: list[float] = field(
        default_factory=lambda: [0.25, 0.5, 0.75, 0.9, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0])
    max_iterations: int = 100
    sweep_iterations: int = 20
    n_signals: int = 100
    sample_size: int = 0
    output: str = "results"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS + ("all",):
            raise ValueError(f"unknown experiment {self.experiment!r}")
        for name in ("seeds", "omegas", "snr_db", "out_of_band", "sweep_factors"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be nonempty")
        if self.graph != "minnesota" and not Path(self.graph).is_file():
            raise FileNotFoundError(f"graph file {self.graph} does not exist")
        if self.max_iterations < STEADY_WINDOW:
            raise ValueError(f"max_iterations must be at least {STEADY_WINDOW}")

    @classmethod
    def from_mapping(cls, items: dict) -> ExperimentConfig:
        hints = typing.get_type_hints(cls)
        kwargs = {}
        for key, raw in items.items():
            if key not in hints:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(hints[key], raw)
        return cls(**kwargs)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(tp, raw):
    if not isinstance(raw, str):
        return raw
    origin = typing.get_origin(tp)
    if origin is list:
        (inner,) = typing.get_args(tp)
        return [_coerce(inner, part.strip()) for part in raw.split(",") if part.strip()]
    if tp is bool:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return tp(raw)


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = line.split("=", 1)
        elif ":" in line:
            key, value = line.split(":", 1)
        else:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {line!r}")
        out[key.strip()] = value.strip()
    return out


def load_config(path, **overrides) -> ExperimentConfig:
    items = parse_config_text(Path(path).read_text(encoding="utf-8"))
    items.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_mapping(items)


@dataclass
class Table:
    columns: list
    rows: list

    def column(self, name: str) -> np.ndarray:
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows], dtype=float)

    def write(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# rows: {len(self.rows)}\n")
            w = csv.writer(fh)
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])


def read_table(path) -> Table:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        first = fh.readline()
        if not first.startswith("# rows:"):
            raise ValueError(f"{path}: missing '# rows' header")
        declared = int(first.split(":", 1)[1])
        reader = csv.reader(fh)
        cols = next(reader)
        rows = [[float(x) for x in r] for r in reader if r]
    if len(rows) != declared:
        raise ValueError(f"{path}: header declares {declared} rows, found {len(rows)}")
    return Table(cols, rows)


class Workspace:
    """Graph, spectrum and one-hop partition shared by the runners."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        if cfg.graph == "minnesota":
            g = minnesota(largest_component_only=False)
            self.graph_path = str(minnesota_path())
        else:
            g = load_edge_list(cfg.graph)
            self.graph_path = cfg.graph
        if cfg.largest_component:
            g, _ = largest_component(g)
        self.graph: Graph = g

    @cached_property
    def basis(self) -> SpectralBasis:
        return eigendecompose(laplacian(self.graph))

    @cached_property
    def one_hop(self) -> tuple[LocalSetPartition, LocalMeasures]:
        p = greedy_one_hop(self.graph)
        return p, measures(self.graph, p)

    def random_voronoi(self, k: int, seed: int, attempts: int = 100) -> tuple[LocalSetPartition, LocalMeasures, int]:
        """Voronoi partition of a random ``k``-set; reseeds when a vertex is unreachable."""
        for offset in range(attempts):
            s = random_sampling_set(self.graph, k, seed + offset)
            try:
                p = voronoi_partition(self.graph, s)
            except CoverageError as exc:
                log.info("random sampling set with seed %d rejected: %s", seed + offset, exc)
                continue
            return p, measures(self.graph, p), seed + offset
        raise CoverageError(f"no covering random sampling set in {attempts} attempts")

    def provenance(self) -> dict:
        return {
            "graph": self.graph_path,
            "graph_sha256": self.graph.fingerprint(),
            "n_vertices": self.graph.n_vertices,
            "n_edges": self.graph.n_edges,
            "kernel_backend": _kernels.BACKEND,
            "version": __version__,
        }


def _curve(space: BandlimitedSpace, p: LocalSetPartition, local: LocalMeasures, truth, samples, method: str,
           iterations: int, q_source: str = "tilde"):
    cfg = ReconstructionConfig(method=method, max_iterations=iterations, rel_tol=_NO_STOP,
                               track_truth=truth, q_source=q_source)
    # sweeps deliberately cross the condition; the report carries the flag instead
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GuaranteeVoidWarning)
        rep = reconstruct(space, p, samples, cfg, local=local)
    if rep.iterations < iterations:
        # an exactly zero residual stopped the run; later updates would add zero
        pad = iterations - rep.iterations
        rep = dataclasses.replace(rep, errors=rep.errors + rep.errors[-1:] * pad)
    return rep


def iterations_to(errors, level: float = TARGET_ERROR) -> int | None:
    for k, e in enumerate(errors):
        if e <= level:
            return k
    return None


def steady_state(errors) -> float:
    """Mean relative error over the final iterations."""
    return float(np.mean(errors[-STEADY_WINDOW:]))


def run_convergence(ws: Workspace) -> tuple[Table, dict]:
    cfg = ws.cfg
    omega = cfg.omegas[0]
    space = ws.basis.band(omega)
    p, local = ws.one_hop
    truth = generate_bandlimited(space, cfg.seeds[0])
    samples = truth[p.sampling_set.members]
    curves, summary = {}, {"omega": omega, "sample_size": len(p.sampling_set), "signal_seed": cfg.seeds[0],
                           "partition": local.as_dict()}
    for m in METHODS:
        rep = _curve(space, p, local, truth, samples, m, cfg.max_iterations)
        curves[m] = rep.errors
        summary[f"{m}_gamma"] = rep.gamma
        summary[f"{m}_iterations_to_1e-3"] = iterations_to(rep.errors)
    rows = [[k] + [curves[m][k] for m in METHODS] for k in range(cfg.max_iterations + 1)]
    return Table(["iteration"] + [f"{m}_err" for m in METHODS], rows), summary


def run_geometry(ws: Workspace) -> tuple[Table, dict]:
    cfg = ws.cfg
    omega = cfg.omegas[0]
    space = ws.basis.band(omega)
    p1, m1 = ws.one_hop
    k = cfg.sample_size or len(p1.sampling_set)
    p2, m2, used_seed = ws.random_voronoi(k, cfg.seeds[0])
    truth = generate_bandlimited(space, cfg.seeds[0])
    cols, curves = ["iteration"], []
    summary = {"omega": omega, "one_hop": m1.as_dict(), "random": m2.as_dict(), "random_seed": used_seed,
               "sample_size_one_hop": len(p1.sampling_set), "sample_size_random": len(p2.sampling_set)}
    for name, p, local in (("onehop", p1, m1), ("random", p2, m2)):
        samples = truth[p.sampling_set.members]
        for m in METHODS:
            rep = _curve(space, p, local, truth, samples, m, cfg.max_iterations)
            cols.append(f"{name}_{m}_err")
            curves.append(rep.errors)
            summary[f"{name}_{m}_iterations_to_1e-3"] = iterations_to(rep.errors)
    rows = [[k] + [c[k] for c in curves] for k in range(cfg.max_iterations + 1)]
    return Table(cols, rows), summary


def mismatch_cutoffs(basis: SpectralBasis, omega1: float) -> tuple[float, float, bool]:
    """``(omega1, 2 * omega1)``, rescaled to ``max(lambda) / 8`` when the graph is too small."""
    lam_max = float(basis.eigenvalues[-1])
    if lam_max < 2 * omega1:
        log.warning("max eigenvalue %.4g < 2*omega1; rescaling omega1 to %.4g", lam_max, lam_max / 8)
        return lam_max / 8, lam_max / 4, True
    return omega1, 2 * omega1, False


def run_cutoff_mismatch(ws: Workspace) -> tuple[Table, dict]:
    cfg = ws.cfg
    w1, w2, rescaled = mismatch_cutoffs(ws.basis, cfg.omegas[0])
    p, local = ws.one_hop
    cases = {1: (w1, w1), 2: (w1, w2), 3: (w2, w2), 4: (w2, w1)}
    truths = {w: generate_bandlimited(ws.basis.band(w), cfg.seeds[0]) for w in (w1, w2)}
    cols, curves = ["iteration"], []
    summary = {"omega1": w1, "omega2": w2, "rescaled": rescaled}
    for m in METHODS:
        for case, (actual, known) in cases.items():
            truth = truths[actual]
            rep = _curve(ws.basis.band(known), p, local, truth, truth[p.sampling_set.members], m,
                         cfg.max_iterations)
            cols.append(f"{m}_case{case}")
            curves.append(rep.errors)
            summary[f"{m}_case{case}_iterations_to_1e-3"] = iterations_to(rep.errors)
            summary[f"{m}_case{case}_final_error"] = rep.errors[-1]
    rows = [[k] + [c[k] for c in curves] for k in range(cfg.max_iterations + 1)]
    return Table(cols, rows), summary


def run_bound_sweep(ws: Workspace) -> tuple[Table, dict]:
    """Success rate versus cutoff on a random Voronoi partition with exact ``Q_max``.

    Signal ``j`` at every cutoff uses seed ``seeds[0] + 1000 + j``.
    """
    cfg = ws.cfg
    p1, _ = ws.one_hop
    k = cfg.sample_size or len(p1.sampling_set)
    p, local, used_seed = ws.random_voronoi(k, cfg.seeds[0])
    threshold = 1.0 / local.Q_max**2
    rows = []
    for factor in cfg.sweep_factors:
        omega = factor * threshold
        space = ws.basis.band(omega)
        rates = []
        for m in METHODS:
            ok = 0
            for j in range(cfg.n_signals):
                truth = generate_bandlimited(space, cfg.seeds[0] + 1000 + j)
                rep = _curve(space, p, local, truth, truth[p.sampling_set.members], m, cfg.sweep_iterations,
                             q_source="exact")
                err = np.linalg.norm(rep.final_signal - truth) / np.linalg.norm(truth)
                ok += bool(err <= TARGET_ERROR)
            rates.append(ok / cfg.n_signals)
        rows.append([omega, factor, space.dim] + rates)
    summary = {"Q_max": local.Q_max, "threshold_omega": threshold, "random_seed": used_seed,
               "partition": local.as_dict(), "n_signals": cfg.n_signals, "iterations": cfg.sweep_iterations}
    return Table(["omega", "omega_over_threshold", "band_dim"] + [f"{m}_rate" for m in METHODS], rows), summary


def run_noise(ws: Workspace) -> tuple[Table, dict]:
    cfg = ws.cfg
    omega = cfg.omegas[0]
    space = ws.basis.band(omega)
    p, local = ws.one_hop
    truth = generate_bandlimited(space, cfg.seeds[0])
    clean = truth[p.sampling_set.members]
    cols, curves, summary = ["iteration"], [], {"omega": omega, "steady_window": STEADY_WINDOW}
    for snr in cfg.snr_db:
        noisy = add_observation_noise(clean, snr, cfg.seeds[0] + 1)
        for m in METHODS:
            rep = _curve(space, p, local, truth, noisy, m, cfg.max_iterations)
            cols.append(f"{m}_snr{snr:g}")
            curves.append(rep.errors)
            summary[f"{m}_snr{snr:g}_steady_state"] = steady_state(rep.errors)
    rows = [[k] + [c[k] for c in curves] for k in range(cfg.max_iterations + 1)]
    return Table(cols, rows), summary


def approx_bandlimited_signal(space: BandlimitedSpace, fraction: float, seed) -> np.ndarray:
    """Unit-norm signal with exactly ``fraction`` of its energy above the cutoff.

    Built as ``a * P g + b * (I - P) h`` from independent normal draws with each
    component normalised first.
    """
    if not 0 <= fraction < 1:
        raise ValueError("out-of-band fraction must be in [0, 1)")
    rng = np.random.default_rng(seed)
    g = space.project(rng.standard_normal(space.n))
    h = rng.standard_normal(space.n)
    h = h - space.project(h)
    g /= np.linalg.norm(g)
    hn = np.linalg.norm(h)
    if fraction > 0 and hn == 0:
        raise ValueError("band covers the whole spectrum; no out-of-band component possible")
    out = math.sqrt(1 - fraction) * g
    if fraction > 0:
        out = out + math.sqrt(fraction) * h / hn
    return out


def run_approx_bandlimited(ws: Workspace) -> tuple[Table, dict]:
    cfg = ws.cfg
    omega = cfg.omegas[0]
    space = ws.basis.band(omega)
    p, local = ws.one_hop
    cols, curves, summary = ["iteration"], [], {"omega": omega, "steady_window": STEADY_WINDOW}
    for frac in cfg.out_of_band:
        truth = approx_bandlimited_signal(space, frac, cfg.seeds[0])
        for m in METHODS:
            rep = _curve(space, p, local, truth, truth[p.sampling_set.members], m, cfg.max_iterations)
            cols.append(f"{m}_oob{frac:g}")
            curves.append(rep.errors)
            summary[f"{m}_oob{frac:g}_steady_state"] = steady_state(rep.errors)
    rows = [[k] + [c[k] for c in curves] for k in range(cfg.max_iterations + 1)]
    return Table(cols, rows), summary


RUNNERS = {
    "convergence": run_convergence,
    "geometry": run_geometry,
    "cutoff_mismatch": run_cutoff_mismatch,
    "bound_sweep": run_bound_sweep,
    "noise": run_noise,
    "approx_bandlimited": run_approx_bandlimited,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def run_experiment(cfg: ExperimentConfig, out_dir=None, ws: Workspace | None = None) -> dict:
    """Run one experiment (or ``all``), write CSVs and ``manifest.json``; return the manifest."""
    out = Path(out_dir or cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    ws = ws or Workspace(cfg)
    names = EXPERIMENTS if cfg.experiment == "all" else (cfg.experiment,)
    manifest = {"config": cfg.to_json(), "provenance": ws.provenance(), "results": {}}
    for name in names:
        table, summary = RUNNERS[name](ws)
        path = out / f"{name}.csv"
        table.write(path)
        manifest["results"][name] = {"csv": path.name, "rows": len(table.rows), "summary": summary}
        log.info("%s: wrote %s (%d rows)", name, path, len(table.rows))
    manifest = _jsonable(manifest)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
