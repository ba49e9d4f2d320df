"""Command-line entry point: ``graphband <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, experiments
from .graph import GraphFormatError, largest_component, laplacian, load_edge_list, read_full_signal, read_signal, write_signal
from .localsets import (
    PartitionError,
    greedy_one_hop,
    measures,
    random_sampling_set,
    read_partition,
    read_sampling_set,
    validate_partition,
    voronoi_partition,
    write_partition,
    write_sampling_set,
)
from .reconstruction import ReconstructionConfig, reconstruct
from .spectral import eigendecompose, write_spectrum


def _load_graph(args):
    g = load_edge_list(args.graph, "one" if args.one_based else "zero")
    if args.largest_component:
        g, _ = largest_component(g)
    return g


def _dump(obj, path) -> None:
    text = json.dumps(obj, indent=2) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_partition(args) -> int:
    g = _load_graph(args)
    if args.method == "one-hop":
        p = greedy_one_hop(g)
    else:
        if args.samples:
            s = read_sampling_set(args.samples)
        elif args.k is not None:
            s = random_sampling_set(g, args.k, args.seed)
        else:
            raise ValueError("voronoi needs --samples or --k")
        p = voronoi_partition(g, s)
    write_partition(p, args.out)
    if args.sampling_out:
        write_sampling_set(p.sampling_set, args.sampling_out)
    _dump({"partition": args.out, **measures(g, p).as_dict()}, "-")
    return 0


def cmd_reconstruct(args) -> int:
    g = _load_graph(args)
    p = read_partition(args.partition, g.n_vertices)
    report = validate_partition(g, p)
    if not report.valid:
        raise PartitionError(report.describe())
    verts, vals = read_signal(args.samples, g.n_vertices)
    members = p.sampling_set.members
    if not np.array_equal(np.sort(verts), members):
        raise GraphFormatError("sample vertices must match the partition's sampled vertices exactly")
    samples = vals[np.argsort(verts)]
    truth = read_full_signal(args.truth, g.n_vertices) if args.truth else None
    basis = eigendecompose(laplacian(g))
    space = basis.band(args.omega)
    cfg = ReconstructionConfig(method=args.method, omega=args.omega, max_iterations=args.max_iterations,
                               rel_tol=args.rel_tol, track_truth=truth, q_source=args.q_source)
    rep = reconstruct(space, p, samples, cfg, local=measures(g, p))
    _dump(rep.to_json(), args.out)
    if args.signal_out:
        write_signal(args.signal_out, rep.final_signal)
    return 0


def cmd_certify(args) -> int:
    g = _load_graph(args)
    p = read_partition(args.partition, g.n_vertices)
    local = measures(g, p)
    space = eigendecompose(laplacian(g)).band(args.omega)
    spec = analysis.FrameSpec(analysis.frame_kind(args.frame), p, space)
    cert = analysis.certify_frame_bounds(spec, local=local, q_source=args.q_source)
    out = {"frame": spec.kind, "omega": args.omega, "band_dim": space.dim, **cert.to_json(),
           "contraction_norm": analysis.contraction_norm(space, p), **local.as_dict()}
    _dump(out, args.out)
    return 0


def cmd_experiment(args) -> int:
    cfg = experiments.load_config(args.config, output=args.out)
    manifest = experiments.run_experiment(cfg, args.out)
    for name, res in manifest["results"].items():
        print(f"{name}: {res['csv']} ({res['rows']} rows)")
    return 0


def cmd_spectrum(args) -> int:
    g = _load_graph(args)
    write_spectrum(eigendecompose(laplacian(g)), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graphband", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_args(sp):
        sp.add_argument("--graph", required=True, help="edge-list file")
        sp.add_argument("--largest-component", action="store_true",
                        help="keep only the largest connected component (vertices are relabelled)")
        sp.add_argument("--one-based", action="store_true", help="edge list uses 1-based ids")

    sp = sub.add_parser("partition", help="build a sampling set and its local sets")
    graph_args(sp)
    sp.add_argument("--method", choices=["one-hop", "voronoi"], required=True)
    sp.add_argument("--samples", help="sampling-set file (one id per line)")
    sp.add_argument("--k", type=int, help="random sampling-set size")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="partition.csv")
    sp.add_argument("--sampling-out", help="also write the sampling set here")
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("reconstruct", help="reconstruct a signal from samples")
    graph_args(sp)
    sp.add_argument("--method", choices=["ilsr", "iwr", "ipr"], required=True)
    sp.add_argument("--partition", required=True)
    sp.add_argument("--samples", required=True, help="CSV vertex,value on the sampled vertices")
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--truth", help="CSV vertex,value reference signal for error curves")
    sp.add_argument("--max-iterations", type=int, default=1000)
    sp.add_argument("--rel-tol", type=float, default=1e-9)
    sp.add_argument("--q-source", choices=["tilde", "exact"], default="tilde")
    sp.add_argument("--out", default="report.json")
    sp.add_argument("--signal-out", help="write the reconstructed signal as CSV")
    sp.set_defaults(func=cmd_reconstruct)

    sp = sub.add_parser("certify", help="check frame bounds and the contraction")
    graph_args(sp)
    sp.add_argument("--partition", required=True)
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--frame", choices=["delta", "weighted", "indicator"], required=True)
    sp.add_argument("--q-source", choices=["tilde", "exact"], default="exact")
    sp.add_argument("--out", default="cert.json")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("experiment", help="run an experiment from a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", required=True, help="output directory")
    sp.set_defaults(func=cmd_experiment)

    sp = sub.add_parser("spectrum", help="export Laplacian eigenvalues as CSV")
    graph_args(sp)
    sp.add_argument("--out", default="spectrum.csv")
    sp.set_defaults(func=cmd_spectrum)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (GraphFormatError, PartitionError, IndexError, ValueError, FileNotFoundError) as exc:
        print(f"graphband: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
