"""Command-line front end: ``combforge gen|check|decompose|connector|embed|experiment``.

Exit codes: 0 success or property holds, 1 negative verdict or pipeline
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import graphs as G
from .connectors import ConnectorError, PathSearchError, build_connector
from .embedding import Embedding, PipelineTrace, validate
from .experiment import ConfigError, ExperimentConfig, run, success_rates
from .extraction import PipelineError, almost_spanning_pipeline, check_bcps
from .pipelines import embed_comb_sqrt, embed_teeth_tree, replay
from .trees import Tree, find_teeth, format_tree, make_comb, random_tree, read_tree, split_spines, teeth_inside

CHECKS = ("pairwise", "expander", "small-set", "ddr", "density", "degree", "bcps")


class UsageError(Exception):
    pass


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _read_graph(path: str | None) -> G.Graph:
    if not path:
        raise UsageError("--in is required")
    g, _ = G.parse_graph(Path(path).read_text())
    return g


def _read_tree(path: str | None) -> Tree:
    if not path:
        raise UsageError("a tree file is required")
    return read_tree(path)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- subcommands


def cmd_gen(a) -> int:
    if a.n is None:
        raise UsageError("--n is required")
    if a.comb is not None:
        t = make_comb(a.n, a.comb)
        _emit(format_tree(t), a.out)
        return 0
    if a.tree:
        t = random_tree(a.n, a.max_degree, a.seed)
        _emit(format_tree(t), a.out)
        return 0
    if a.p is None:
        raise UsageError("--p is required for a random graph")
    g = G.sample_gnp(a.n, a.p, a.seed)
    _emit(G.format_graph(g), a.out)
    return 0


def cmd_check(a) -> int:
    g = _read_graph(a.inp)
    prop = a.property
    if prop == "pairwise":
        if a.m is None:
            raise UsageError("--m is required")
        rep = G.check_pairwise_edge(g, a.m, trials=a.budget, seed=a.seed)
    elif prop == "expander":
        if a.d is None:
            raise UsageError("--d is required")
        rep = G.check_expander(g, a.d, trials=a.budget, seed=a.seed)
    elif prop == "small-set":
        if a.d is None:
            raise UsageError("--d is required")
        rep = G.check_small_set_expansion_into(g, range(g.n), a.d, trials=a.budget, seed=a.seed)
    elif prop == "ddr":
        if a.d is None or a.D is None or a.r is None:
            raise UsageError("--d, --D and --r are required")
        rep = G.check_ddr(g, a.d, a.D, a.r, trials=a.budget, seed=a.seed)
    elif prop == "density":
        if a.a is None or a.b is None or a.p is None:
            raise UsageError("--a, --b and --p are required")
        rep = G.check_density(g, a.a, a.b, a.p, out_of_regime=True, trials=a.budget, seed=a.seed)
    elif prop == "degree":
        if a.eta is None or a.max_deg is None:
            raise UsageError("--eta and --max-deg are required")
        rep = G.check_degree_conditions(g, (), a.eta, a.max_deg)
    else:
        if a.beta is None or a.gamma is None:
            raise UsageError("--beta and --gamma are required")
        rep = check_bcps(g, a.beta, a.gamma, trials=a.budget, seed=a.seed)
    sys.stdout.write(rep.to_text())
    return 0 if rep.holds else 1


def cmd_decompose(a) -> int:
    t = _read_tree(a.inp)
    if a.k is None or a.eps is None:
        raise UsageError("--k and --eps are required")
    split, inside = split_spines(t, a.k, a.eps)
    split.check(t)
    lines = [
        f"split n={t.n} k_level={split.k} t1={split.t1} t2={split.t2}",
        f"teeth total={len(find_teeth(t, a.k))} inside_S={inside}",
        "S " + " ".join(map(str, sorted(split.S))),
        "T1 " + " ".join(map(str, sorted(split.T1))),
        "T2 " + " ".join(map(str, sorted(split.T2))),
    ]
    for p in teeth_inside(t, split, a.k):
        lines.append("tooth " + " ".join(map(str, p.vertices)))
    _emit("\n".join(lines) + "\n", a.out)
    return 0


def cmd_connector(a) -> int:
    g = _read_graph(a.inp)
    if a.l is None:
        raise UsageError("--l is required")
    try:
        c = build_connector(g, a.l, range(g.n), seed=a.seed, k=a.k)
    except (ConnectorError, PathSearchError) as exc:
        sys.stderr.write(f"connector failed: {exc}\n")
        return 1
    _emit(c.to_text(), a.out)
    return 0


def _write_result(res, a) -> None:
    _emit(res.embedding.to_text(), a.out)
    trace_path = a.trace or (a.out + ".trace" if a.out else None)
    if trace_path:
        Path(trace_path).write_text(res.trace.to_text())


def cmd_embed(a) -> int:
    try:
        if a.pipeline == "comb-sqrt":
            if a.n is None:
                raise UsageError("--n is required")
            res = embed_comb_sqrt(a.n, a.seed, a.profile)
        elif a.pipeline == "teeth":
            if a.k is None:
                raise UsageError("--k (tooth length in edges) is required")
            if a.inp:
                t = _read_tree(a.inp)
            elif a.n is not None:
                t = make_comb(a.n, a.k + 1)
            else:
                raise UsageError("give --in TREE or --n for a comb")
            res = embed_teeth_tree(t, a.k, a.eps if a.eps is not None else 1.0, a.seed, a.profile)
        elif a.pipeline == "almost":
            g = _read_graph(a.inp)
            t = _read_tree(a.tree)
            if a.eps is None:
                raise UsageError("--eps is required")
            emb = almost_spanning_pipeline(g, t, a.eps, a.seed)
            _emit(emb.to_text(), a.out)
            return 0
        else:
            if not a.inp:
                raise UsageError("--in TRACE is required")
            trace = PipelineTrace.from_text(Path(a.inp).read_text())
            res = replay(trace, _read_tree(a.tree) if a.tree else None)
    except PipelineError as exc:
        sys.stderr.write(f"pipeline failed at stage {exc.stage}: {exc}\n")
        if exc.trace is not None and a.trace:
            Path(a.trace).write_text(exc.trace.to_text())
        return 1
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write_result(res, a)
    return 0


def cmd_validate(a) -> int:
    g = _read_graph(a.inp)
    t = _read_tree(a.tree)
    emb = Embedding.from_text(Path(a.embedding).read_text(), g.n)
    rep = validate(g, t, emb)
    sys.stdout.write(rep.to_text())
    return 0 if rep.holds else 1


def cmd_experiment(a) -> int:
    if not a.n_grid:
        raise UsageError("--n is required")
    cfg = ExperimentConfig(
        pipeline=a.pipeline, n_grid=a.n_grid, k_grid=a.k_grid or (), eps=a.eps if a.eps is not None else 1.0,
        profile=a.profile, seeds=a.seeds, seed_base=a.seed, out=a.out, threads=a.threads,
        timing=a.timing, keep_artifacts=a.keep_artifacts,
    )
    try:
        text = run(cfg)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    if not a.out:
        sys.stdout.write(text)
    for (n, k), rate in success_rates(text).items():
        sys.stderr.write(f"n={n} k={k} success={rate:.2f}\n")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="combforge", description="Random graphs, connectors and comb embeddings.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample G(n,p), a random tree or a comb")
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--comb", type=int, metavar="K", help="write make_comb(n, K) instead")
    g.add_argument("--tree", action="store_true", help="write a random tree instead")
    g.add_argument("--max-degree", type=int, default=None)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="check a graph property")
    c.add_argument("property", choices=CHECKS)
    c.add_argument("--in", dest="inp")
    for name, typ in (("--d", float), ("--D", float), ("--r", int), ("--m", int), ("--a", int), ("--b", int),
                      ("--p", float), ("--eta", float), ("--max-deg", float),
                      ("--beta", float), ("--gamma", float)):
        c.add_argument(name, type=typ)
    c.add_argument("--budget", type=int, default=2000, help="sampling trials when enumeration is too large")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("decompose", help="split a tree into S, T1, T2 around its teeth")
    d.add_argument("--in", dest="inp")
    d.add_argument("--k", type=int, help="tooth length in edges")
    d.add_argument("--eps", type=float)
    d.add_argument("--out")
    d.set_defaults(func=cmd_decompose)

    k = sub.add_parser("connector", help="build a connector in a graph")
    k.add_argument("--in", dest="inp")
    k.add_argument("--l", type=int, help="connector vertex count")
    k.add_argument("--k", type=int, default=None, help="rotation parameter")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--out")
    k.set_defaults(func=cmd_connector)

    e = sub.add_parser("embed", help="run an embedding pipeline")
    e.add_argument("pipeline", choices=("comb-sqrt", "teeth", "almost", "replay"))
    e.add_argument("--n", type=int)
    e.add_argument("--k", type=int)
    e.add_argument("--eps", type=float)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--profile", default="desk")
    e.add_argument("--in", dest="inp", help="graph (almost), tree (teeth) or trace (replay)")
    e.add_argument("--tree", help="tree file (almost; optional for replay of a teeth trace)")
    e.add_argument("--out")
    e.add_argument("--trace", help="trace output path (default: OUT.trace)")
    e.set_defaults(func=cmd_embed)

    v = sub.add_parser("validate", help="validate an embedding file")
    v.add_argument("--in", dest="inp", help="graph file")
    v.add_argument("--tree")
    v.add_argument("--embedding")
    v.set_defaults(func=cmd_validate)

    x = sub.add_parser("experiment", help="seed sweep written as CSV")
    x.add_argument("--pipeline", choices=("comb_sqrt", "teeth_tree"), default="comb_sqrt")
    x.add_argument("--n", dest="n_grid", type=_ints)
    x.add_argument("--k", dest="k_grid", type=_ints)
    x.add_argument("--eps", type=float)
    x.add_argument("--profile", default="desk")
    x.add_argument("--seeds", type=int, default=20)
    x.add_argument("--seed", type=int, default=0, help="first seed")
    x.add_argument("--threads", type=int, default=1)
    x.add_argument("--timing", action="store_true", help="fill elapsed_ms (breaks byte-determinism)")
    x.add_argument("--keep-artifacts", metavar="DIR")
    x.add_argument("--out")
    x.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return a.func(a)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"combforge: error: {exc}\n")
        return 2
    except (OSError, ValueError) as exc:
        sys.stderr.write(f"combforge: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
