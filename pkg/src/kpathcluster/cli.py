"""Command-line pipeline: cluster, centrality-hist, eval, generate."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from .graph import Graph, Partition, parse_edge_list, read_partition, write_edge_list, write_partition
from .centrality import (
    DEFAULT_KAPPA,
    DEFAULT_RHO_MULTIPLIER,
    default_rho,
    erw_kpath,
    export_centralities,
    resolve_workers,
)
from .distance import edge_distances, export_weights
from .louvain import DEFAULT_MIN_GAIN, louvain, modularity
from .evaluation import (
    SyntheticSpec,
    confusion_matrix,
    nmi,
    planted_partition,
    realized_edge_counts,
)

logger = logging.getLogger(__name__)

DEFAULT_SEED = 13
SEED_ENV_VAR = "KPATHCLUSTER_SEED"


class CliError(RuntimeError):
    pass


def resolve_seed(flag_value: int | None) -> tuple[int, str]:
    """Seed precedence: --seed flag, then the environment, then the default."""
    if flag_value is not None:
        return flag_value, "flag"
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env), "env"
        except ValueError:
            raise CliError(f"{SEED_ENV_VAR} must be an integer, got {env!r}")
    return DEFAULT_SEED, "default"


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}")


def _atomic_write_all(files: dict[Path, str]) -> None:
    """Write every file via a temporary sibling; nothing lands on failure."""
    temps: list[tuple[Path, Path]] = []
    try:
        for path, content in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + f".tmp-{os.getpid()}")
            tmp.write_text(content, encoding="utf-8")
            temps.append((tmp, path))
        for tmp, path in temps:
            os.replace(tmp, path)
    except BaseException:
        for tmp, _ in temps:
            tmp.unlink(missing_ok=True)
        raise


def log_binned_histogram(
    values, num_bins: int = 20
) -> list[tuple[float, float, float]]:
    """(lower, upper, probability) rows over logarithmically spaced bins.

    Probabilities are relative to all values, including any zeros, which
    cannot be placed on a log axis and are therefore left unbinned.
    """
    vals = np.asarray(values, dtype=np.float64)
    if len(vals) == 0:
        return []
    pos = vals[vals > 0.0]
    if len(pos) == 0:
        return []
    lo, hi = float(pos.min()), float(pos.max())
    if lo == hi:
        return [(lo, hi, len(pos) / len(vals))]
    edges = np.logspace(np.log10(lo), np.log10(hi), num_bins + 1)
    counts, _ = np.histogram(pos, bins=edges)
    return [
        (float(edges[k]), float(edges[k + 1]), counts[k] / len(vals))
        for k in range(num_bins)
    ]


def _summary_text(items: dict[str, object]) -> str:
    return "".join(f"{key}={value}\n" for key, value in items.items())


def _load_graph(args) -> Graph:
    return parse_edge_list(_read_text(args.input), directed=args.directed)


def _resolve_rho(args, g: Graph) -> int:
    if args.rho is not None:
        return args.rho
    return default_rho(g, args.rho_multiplier)


def cmd_cluster(args) -> int:
    seed, seed_source = resolve_seed(args.seed)
    out_dir = Path(args.out_dir)
    t_start = time.perf_counter()

    t0 = time.perf_counter()
    g = _load_graph(args)
    t_parse = time.perf_counter() - t0

    rho = _resolve_rho(args, g)
    workers = resolve_workers(args.workers)

    t0 = time.perf_counter()
    cent = erw_kpath(g, args.kappa, rho, seed, workers=workers)
    t_cent = time.perf_counter() - t0

    t0 = time.perf_counter()
    weights = edge_distances(g, cent)
    t_dist = time.perf_counter() - t0

    t0 = time.perf_counter()
    result = louvain(g, weights, min_gain=args.min_gain)
    t_louvain = time.perf_counter() - t0

    summary = {
        "command": "cluster",
        "input": args.input,
        "directed": args.directed,
        "n": g.n,
        "m": g.m,
        "duplicates_dropped": g.duplicates_dropped,
        "self_loops_dropped": g.self_loops_dropped,
        "kappa": args.kappa,
        "rho": rho,
        "rho_multiplier": args.rho_multiplier if args.rho is None else "",
        "seed": seed,
        "seed_source": seed_source,
        "min_gain": f"{args.min_gain:.12g}",
        "workers": workers,
        "modularity": f"{result.modularity:.12g}",
        "communities": result.community_count,
        "iterations": result.iterations,
        "parse_seconds": f"{t_parse:.3f}",
        "centrality_seconds": f"{t_cent:.3f}",
        "distance_seconds": f"{t_dist:.3f}",
        "louvain_seconds": f"{t_louvain:.3f}",
        "total_seconds": f"{time.perf_counter() - t_start:.3f}",
    }
    outputs = {
        out_dir / "partition.tsv": write_partition(result.partition, g.labels),
        out_dir / "weights.tsv": export_weights(g, weights),
        out_dir / "summary.txt": _summary_text(summary),
    }
    if args.write_centrality:
        outputs[out_dir / "centrality.tsv"] = export_centralities(g, cent)
    _atomic_write_all(outputs)
    print(_summary_text(summary), end="")
    return 0


def cmd_centrality_hist(args) -> int:
    seed, _ = resolve_seed(args.seed)
    kappas = args.kappas
    if not kappas:
        raise CliError("at least one kappa value is required")
    out_dir = Path(args.out_dir)
    g = _load_graph(args)
    rho = _resolve_rho(args, g)
    workers = resolve_workers(args.workers)

    outputs = {}
    for kappa in kappas:
        cent = erw_kpath(g, kappa, rho, seed, workers=workers)
        rows = log_binned_histogram(cent.values, num_bins=args.bins)
        lines = ["lower,upper,probability\n"]
        lines += [f"{lo:.12g},{hi:.12g},{p:.12g}\n" for lo, hi, p in rows]
        outputs[out_dir / f"centrality_hist_k{kappa}.csv"] = "".join(lines)
    _atomic_write_all(outputs)
    for path in outputs:
        print(path)
    return 0


def _partition_from_maps(found: dict[str, int], truth: dict[str, int]):
    if set(found) != set(truth):
        raise CliError("partition and ground truth cover different vertex labels")
    order = sorted(found)
    a = Partition.from_labels([found[label] for label in order])
    b = Partition.from_labels([truth[label] for label in order])
    return a, b


def cmd_eval(args) -> int:
    found = read_partition(_read_text(args.partition))
    truth = read_partition(_read_text(args.ground_truth))
    if not found:
        raise CliError("empty partition file")
    a, b = _partition_from_maps(found, truth)
    cm = confusion_matrix(b, a)  # rows = ground truth, cols = found
    print(f"nmi={nmi(a, b):.12g}")
    print(f"confusion_rows={cm.shape[0]}")
    print(f"confusion_cols={cm.shape[1]}")
    return 0


def cmd_generate(args) -> int:
    seed, _ = resolve_seed(args.seed)
    spec = SyntheticSpec(
        n=args.n, q=args.q, p_in=args.p_in, p_out=args.p_out, seed=seed
    )
    g, truth = planted_partition(spec)
    intra, inter = realized_edge_counts(g, truth)
    out_dir = Path(args.out_dir)
    _atomic_write_all(
        {
            out_dir / "edges.tsv": write_edge_list(g),
            out_dir / "ground_truth.tsv": write_partition(truth, g.labels),
        }
    )
    isolated = int((g.degrees() == 0).sum())
    print(f"n={g.n}")
    print(f"edges={g.m}")
    print(f"intra_edges={intra}")
    print(f"inter_edges={inter}")
    print(f"isolated_vertices={isolated}")
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kpathcluster",
        description=(
            "Community detection on edge-list graphs: random-walk edge "
            "centrality, structural-equivalence edge weights, and weighted "
            "greedy modularity maximization."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_io(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="edge-list file")
            p.add_argument(
                "--directed",
                action="store_true",
                help="treat input as directed (it will be symmetrized)",
            )
        p.add_argument("--out-dir", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None)

    def add_walk(p):
        p.add_argument("--kappa", type=int, default=DEFAULT_KAPPA)
        p.add_argument("--rho", type=int, default=None, help="absolute walk count")
        p.add_argument(
            "--rho-multiplier",
            type=float,
            default=DEFAULT_RHO_MULTIPLIER,
            help="walk count as a multiple of |E| (ignored when --rho is set)",
        )
        p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("cluster", help="run the full clustering pipeline")
    add_io(p)
    add_walk(p)
    p.add_argument("--min-gain", type=float, default=DEFAULT_MIN_GAIN)
    p.add_argument(
        "--write-centrality",
        action="store_true",
        help="also write the raw per-edge centrality TSV",
    )
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser(
        "centrality-hist", help="export log-binned centrality histograms"
    )
    add_io(p)
    add_walk(p)
    p.add_argument(
        "--kappas",
        type=_int_list,
        default=[5, 10, 20],
        help="comma-separated walk length bounds",
    )
    p.add_argument("--bins", type=int, default=20)
    p.set_defaults(func=cmd_centrality_hist)

    p = sub.add_parser("eval", help="score a partition against ground truth")
    p.add_argument("--partition", required=True)
    p.add_argument("--ground-truth", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("generate", help="write a planted-partition benchmark")
    add_io(p, needs_input=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--p-in", type=float, required=True)
    p.add_argument("--p-out", type=float, required=True)
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry_point() -> None:
    sys.exit(main())
