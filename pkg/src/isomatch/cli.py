"""Command line driver.

Commands: match, eval, export, sync-only, init-only.
Exit codes: 0 ok, 1 usage error, 2 I/O or input-data error, 3 numerical
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, core, pipeline
from .bundles import (load_matching, load_pairwise_map, save_maps,
                      save_matching, save_pairwise_map, save_trace)
from .errors import InputError, NumericalError
from .evaluate import (DEFAULT_N_THRESHOLDS, DEFAULT_TAU_MAX, cycle_error,
                       geodesic_error, pck_auc)
from .mesh import diameter, load_mesh, save_mesh

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _add_common(p):
    p.add_argument("meshes", nargs="+", help="mesh files (OFF or ASCII PLY)")
    p.add_argument("--basis", type=int, default=30, help="spectral basis size")
    p.add_argument("--universe", default="auto",
                   help="universe size, or 'auto' = max vertex count")
    p.add_argument("--epsilon", type=float, default=core.DEFAULT_EPSILON,
                   help="relative objective improvement threshold")
    p.add_argument("--max-iters", type=int, default=core.DEFAULT_MAX_ITERS)
    p.add_argument("--band-radius", type=int, default=6)
    p.add_argument("--threads", type=int, default=0, help="0 = auto-detect")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")


def build_parser():
    parser = _Parser(prog="isomatch",
                     description="cycle-consistent multi-shape matching")
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("match", help="run the full pipeline"))
    _add_common(sub.add_parser("sync-only",
                               help="stop after synchronisation; write U0/Q0"))
    _add_common(sub.add_parser("init-only",
                               help="stop after pairwise initialisation"))

    pe = sub.add_parser("eval", help="score predictions against ground truth")
    pe.add_argument("meshes", nargs="+")
    pe.add_argument("--pred", required=True, help="directory of pair_i_j.txt files")
    pe.add_argument("--gt", required=True, help="directory of ground-truth maps")
    pe.add_argument("--tau-max", type=float, default=DEFAULT_TAU_MAX)
    pe.add_argument("--diameter-sources", type=int, default=20)
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--out", required=True)

    px = sub.add_parser("export", help="write colour-coded meshes from a bundle")
    px.add_argument("meshes", nargs="+")
    px.add_argument("--bundle", required=True, help="matching bundle file")
    px.add_argument("--style", choices=["colormap", "pairs"], default="colormap")
    px.add_argument("--out", required=True)
    return parser


def _load_meshes(paths):
    return [load_mesh(p) for p in paths]


def _resolve_config(args) -> pipeline.RunConfig:
    if args.universe == "auto":
        universe = None
    else:
        universe = int(args.universe)
    return pipeline.RunConfig(
        basis_size=args.basis, universe_size=universe, epsilon=args.epsilon,
        max_iters=args.max_iters, band_radius=args.band_radius,
        threads=args.threads, seed=args.seed,
    )


def _write_manifest(out: Path, args, config, timings, extra=None):
    manifest = {
        "command": args.command,
        "meshes": [str(p) for p in args.meshes],
        "config": config.to_dict() if config else None,
        "versions": {
            "isomatch": __version__,
            "numpy": np.__version__,
            "python": sys.version.split()[0],
        },
        "timings_seconds": timings,
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _cmd_match(args) -> int:
    if len(args.meshes) < 2:
        raise SystemExit(EXIT_USAGE)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _resolve_config(args)
    t0 = time.perf_counter()
    shapes = _load_meshes(args.meshes)
    result = pipeline.match_collection(shapes, config)
    elapsed = time.perf_counter() - t0

    save_matching(result.state.U, out / "matching.txt")
    save_maps(result.state.Q, out / "maps.txt")
    pairs_dir = out / "pairs"
    pairs_dir.mkdir(exist_ok=True)
    for (i, j), pmap in result.pairwise_maps.items():
        save_pairwise_map(pmap, pairs_dir / f"pair_{i}_{j}.txt")
    save_trace(result.state.trace, [0.0] + result.iteration_times,
               out / "trace.csv")
    _write_manifest(out, args, config, {"total": elapsed}, extra={
        "iterations": result.state.iteration,
        "status": result.state.status,
        "final_objective": result.state.trace[-1],
    })
    print(f"matched {len(shapes)} shapes in {result.state.iteration} iterations "
          f"({result.state.status}); objective {result.state.trace[-1]:.6g}")
    return EXIT_OK


def _cmd_stage(args) -> int:
    if len(args.meshes) < 2:
        raise SystemExit(EXIT_USAGE)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _resolve_config(args)
    t0 = time.perf_counter()
    shapes = _load_meshes(args.meshes)
    bases = pipeline.compute_bases(shapes, config)
    pairwise_fmaps, pairwise_maps = pipeline.pairwise_init(bases, config)
    if args.command == "init-only":
        pairs_dir = out / "pairs"
        pairs_dir.mkdir(exist_ok=True)
        for (i, j), pmap in pairwise_maps.items():
            save_pairwise_map(pmap, pairs_dir / f"pair_{i}_{j}.txt")
    else:  # sync-only
        U0, Q0 = pipeline.synchronize(bases, pairwise_fmaps, config)
        save_matching(U0, out / "matching0.txt")
        save_maps(Q0, out / "maps0.txt")
    _write_manifest(out, args, config, {"total": time.perf_counter() - t0})
    return EXIT_OK


def _cmd_eval(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    shapes = _load_meshes(args.meshes)
    k = len(shapes)
    pred_dir, gt_dir = Path(args.pred), Path(args.gt)
    if not pred_dir.is_dir():
        raise InputError(f"prediction directory not found: {pred_dir}")
    pred_files = sorted(pred_dir.glob("pair_*_*.txt"))
    if not pred_files:
        raise InputError(f"no pair_i_j.txt files in {pred_dir}")

    diams = [diameter(s, n_sources=args.diameter_sources, seed=args.seed)
             for s in shapes]
    t0 = time.perf_counter()
    pair_errors = {}
    preds = {}
    for f in pred_files:
        i, j = (int(x) for x in f.stem.split("_")[1:3])
        if not (0 <= i < k and 0 <= j < k):
            raise InputError(f"{f}: pair indices out of range for {k} meshes")
        gt_file = gt_dir / f.name
        if not gt_file.is_file():
            raise InputError(f"missing ground truth for {f.name}")
        pred = load_pairwise_map(f, shapes[i].n_vertices, i, j)
        gt = load_pairwise_map(gt_file, shapes[i].n_vertices, i, j)
        preds[(i, j)] = pred
        pair_errors[(i, j)] = geodesic_error(pred, gt, shapes[j], diams[j])

    errors = np.concatenate(list(pair_errors.values()))
    thresholds = np.linspace(0.0, args.tau_max, DEFAULT_N_THRESHOLDS)
    curve, auc = pck_auc(errors, thresholds)
    sizes = [s.n_vertices for s in shapes]
    if all((i, j) in preds for i in range(k) for j in range(k) if i != j):
        cyc = cycle_error(preds, sizes, seed=args.seed)
        note = None
    else:
        cyc = None
        note = "cycle error skipped: prediction set does not cover all pairs"
    if k < 3 and cyc is not None:
        note = "fewer than 3 shapes: cycle error is 0 by convention"

    report = {
        "auc": auc,
        "cycle_error": cyc,
        "mean_geodesic_error": float(errors.mean()),
        "n_pairs": len(pair_errors),
        "runtime_seconds": time.perf_counter() - t0,
    }
    if note:
        report["note"] = note
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    with open(out / "pck.csv", "w") as fh:
        fh.write("threshold,pck\n")
        for tau, v in zip(thresholds, curve):
            fh.write(f"{tau:.6f},{v:.6f}\n")
    print(f"auc {auc:.4f}  cycle_error {cyc}  pairs {len(pair_errors)}")
    return EXIT_OK


def _universe_rgb(indices: np.ndarray) -> np.ndarray:
    """Deterministic hash of universe index to RGB; same index, same colour."""
    x = indices.astype(np.uint64)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    x = x ^ (x >> np.uint64(31))
    rgb = np.stack([
        (x & np.uint64(0xFF)),
        ((x >> np.uint64(8)) & np.uint64(0xFF)),
        ((x >> np.uint64(16)) & np.uint64(0xFF)),
    ], axis=1).astype(np.uint8)
    return rgb


def _cmd_export(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    shapes = _load_meshes(args.meshes)
    U = load_matching(args.bundle)
    if U.k != len(shapes):
        raise InputError(
            f"bundle has {U.k} shapes but {len(shapes)} meshes were given"
        )
    for i, (shape, ix) in enumerate(zip(shapes, U.indices)):
        if ix.size != shape.n_vertices:
            raise InputError(
                f"bundle block {i} has {ix.size} rows but mesh has "
                f"{shape.n_vertices} vertices"
            )
    if args.style == "colormap":
        for i, (shape, ix) in enumerate(zip(shapes, U.indices)):
            save_mesh(shape, out / f"shape_{i}.ply", vertex_colors=_universe_rgb(ix))
    else:
        for i in range(U.k):
            for j in range(U.k):
                if i != j:
                    pmap = core.pairwise_from_universe(U, i, j)
                    save_pairwise_map(pmap, out / f"pair_{i}_{j}.txt")
    return EXIT_OK


_COMMANDS = {
    "match": _cmd_match,
    "sync-only": _cmd_stage,
    "init-only": _cmd_stage,
    "eval": _cmd_eval,
    "export": _cmd_export,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SystemExit:
        raise
    except NumericalError as exc:
        print(f"isomatch: numerical failure [{args.command}]: {exc}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, OSError) as exc:
        print(f"isomatch: input error [{args.command}]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
