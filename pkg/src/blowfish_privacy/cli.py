"""Command-line interface.

Subcommands: ``policy build|validate``, ``adjacency induce``,
``bound compute``, ``channel verify|leakage|generate``, ``symmetrise run``,
``tightness sweep``, ``figure bound-sweep``.

Exit codes: 0 success, 1 a requested check failed, 2 bad input, 3 a
resource cap was exceeded. Output files are written atomically after all
computation succeeds, so a non-zero exit never leaves partial files; all
outputs are deterministic for fixed inputs and ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import adjacency as adjacency_mod
from . import bounds as bounds_mod
from . import channel as channel_mod
from . import graphcore
from . import policy as policy_mod
from . import symmetrise as symmetrise_mod
from . import tightness as tightness_mod
from .errors import CapExceededError, InputError, SchemaError
from .reporting import render_csv, render_kv

ENV_MAX_DATABASES = "BLOWFISH_MAX_DATABASES"
EPSILON_SLACK = 1e-12

FIGURE_COLUMNS = (
    "n",
    "theta_or_kind",
    "epsilon",
    "q",
    "max_diameter",
    "bound_bits",
    "leakage_bits",
    "margin_bits",
)


def _write_output(path: str | None, content: str) -> None:
    """Write to ``path`` atomically, or to stdout when no path is given."""
    if path is None:
        sys.stdout.write(content)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".blowfish-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None


def _max_databases(args) -> int:
    if args.max_databases is not None:
        return args.max_databases
    env = os.environ.get(ENV_MAX_DATABASES)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"{ENV_MAX_DATABASES} must be an integer, got {env!r}") from None
    return policy_mod.DEFAULT_DATABASE_CAP


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of numbers: {text!r}") from None


def _parse_ints(text: str, what: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise InputError(f"{what} must be a comma-separated list of integers: {text!r}") from None


def _parse_edges(text: str) -> list[tuple[str, str]]:
    edges = []
    for part in text.split(","):
        if not part:
            continue
        pieces = part.split(":")
        if len(pieces) != 2:
            raise InputError(f"edges must look like 'a:b,c:d', got {part!r}")
        edges.append((pieces[0], pieces[1]))
    return edges


def _load_policy(path: str) -> policy_mod.BlowfishPolicy:
    return policy_mod.policy_from_json(_read_text(path))


def _load_channel(path: str) -> channel_mod.ChannelMatrix:
    return channel_mod.channel_from_csv(_read_text(path))


def _resolve_graph(args, cap: int):
    """Adjacency graph from --graph (graph document) or --policy (induced)."""
    if getattr(args, "graph", None):
        return adjacency_mod.adjacency_from_json(_read_text(args.graph))
    if getattr(args, "policy", None):
        return adjacency_mod.induce_adjacency_graph(_load_policy(args.policy), cap=cap)
    raise InputError("either --graph or --policy is required")


# ---------------------------------------------------------------------------
# Handlers


def _cmd_policy_build(args) -> int:
    permissible = "all"
    if args.permissible != "all":
        doc = json.loads(_read_text(args.permissible))
        if not isinstance(doc, list):
            raise SchemaError("permissible file must hold a JSON list of label lists")
        permissible = [tuple(db) for db in doc]

    kind = args.kind.replace("-", "_")
    params: dict = {}
    if kind == "distance_threshold":
        if args.values is None or args.theta is None:
            raise InputError("distance-threshold policies need --values and --theta")
        params = {"values": _parse_floats(args.values, "--values"), "theta": args.theta}
    elif kind in ("cycle", "complete"):
        if args.m is None:
            raise InputError(f"{args.kind} policies need --m")
        params = {"m": args.m}
    elif kind == "custom":
        if args.tuples is None:
            raise InputError("custom policies need --tuples")
        params = {
            "labels": [t for t in args.tuples.split(",") if t],
            "edges": _parse_edges(args.edges or ""),
        }
        if args.values is not None:
            params["values"] = _parse_floats(args.values, "--values")
    else:
        raise InputError(f"unknown policy kind {args.kind!r}")

    built = policy_mod.build_policy(kind, n=args.n, permissible=permissible, **params)
    _write_output(args.out, policy_mod.policy_to_json(built))
    return 0


def _cmd_policy_validate(args) -> int:
    text = _read_text(args.document)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        print(f"invalid: not a JSON document ({exc})", file=sys.stderr)
        return 2
    try:
        built = policy_mod.policy_from_document(doc)
    except SchemaError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"invalid: {exc}")
        return 1
    print(
        f"valid: {len(built.universe)} tuples, "
        f"{built.secret_graph.edge_count} secret edges, n={built.n}, "
        f"permissible={'all' if built.unconstrained else len(built.permissible)}"
    )
    return 0


def _cmd_adjacency_induce(args) -> int:
    built = _load_policy(args.policy)
    graph = adjacency_mod.induce_adjacency_graph(
        built, cap=_max_databases(args), method=args.method
    )
    _write_output(args.out, adjacency_mod.adjacency_to_json(graph))
    return 0


def _cmd_bound_compute(args) -> int:
    built = _load_policy(args.policy)
    chan = _load_channel(args.channel) if args.channel else None
    report = bounds_mod.audit(
        built, args.epsilon, channel=chan, cap=_max_databases(args)
    )
    _write_output(args.out, report.to_text())
    return 0 if report.bounds_hold in (None, True) else 1


def _cmd_channel_verify(args) -> int:
    chan = _load_channel(args.channel)
    graph = _resolve_graph(args, _max_databases(args)).to_graph()
    violations = channel_mod.validate_channel(chan.probs)
    epsilon_star = channel_mod.minimal_epsilon(chan, graph)
    items = [
        ("rows", chan.rows),
        ("columns", chan.cols),
        ("violations", len(violations)),
        ("minimal_epsilon", epsilon_star),
    ]
    ok = not violations
    if args.epsilon is not None:
        satisfied = epsilon_star <= args.epsilon + EPSILON_SLACK
        items.append(("target_epsilon", args.epsilon))
        items.append(("private_at_target", satisfied))
        ok = ok and satisfied
    _write_output(args.out, render_kv(items))
    return 0 if ok else 1


def _cmd_channel_leakage(args) -> int:
    chan = _load_channel(args.channel)
    prior = None
    if args.prior:
        doc = json.loads(_read_text(args.prior))
        if not isinstance(doc, list):
            raise SchemaError("prior file must hold a JSON list of probabilities")
        prior = channel_mod.Prior(np.asarray(doc, dtype=float))
    report = channel_mod.leakage(chan, prior)
    _write_output(args.out, report.to_text())
    return 0


def _cmd_channel_generate(args) -> int:
    graph = _resolve_graph(args, _max_databases(args)).to_graph()
    chan = channel_mod.graph_randomized_response(graph, args.epsilon)
    if args.shuffle_outputs:
        rng = np.random.default_rng(args.seed)
        order = rng.permutation(chan.cols)
        chan = channel_mod.ChannelMatrix(chan.probs[:, order])
    _write_output(args.out, channel_mod.channel_to_csv(chan))
    return 0


def _cmd_symmetrise_run(args) -> int:
    chan = _load_channel(args.channel)
    adjacency = _resolve_graph(args, _max_databases(args))
    graph = adjacency.to_graph()

    if args.group == "trivial":
        group = graphcore.PermutationGroup.trivial(graph.vertex_count)
    elif args.group == "lifted":
        if not args.policy:
            raise InputError("--group lifted requires --policy")
        built = _load_policy(args.policy)
        generators = graphcore.lift_policy_automorphisms(built, adjacency)
        group = graphcore.generate_group(
            generators, cap=args.max_group, degree=graph.vertex_count
        )
    else:
        group = graphcore.automorphism_group(
            graph, vertex_cap=args.vertex_cap, element_cap=args.max_group
        )

    grouped, _ = symmetrise_mod.diagonal_maximise(chan, graph)
    averaged = symmetrise_mod.group_average(
        grouped, group, strategy=args.strategy, cross_check=args.cross_check
    )
    report = symmetrise_mod.check_symmetrisation(chan, grouped, averaged, group, graph)

    if args.out_grouped:
        _write_output(args.out_grouped, channel_mod.channel_to_csv(grouped))
    if args.out_averaged:
        _write_output(args.out_averaged, channel_mod.channel_to_csv(averaged))
    items = [("group_order", group.order)] + report.to_items()
    _write_output(args.out, render_kv(items))
    return 0 if report.all_passed else 1


def _cmd_tightness_sweep(args) -> int:
    ns = _parse_ints(args.n, "--n")
    deltas = _parse_floats(args.delta, "--delta")
    instances = tightness_mod.sharpness_sweep(ns, deltas)
    _write_output(args.out, tightness_mod.sweep_to_csv(instances))
    return 0


def _cmd_figure_bound_sweep(args) -> int:
    values = _parse_floats(args.values, "--values")
    thetas = _parse_floats(args.thetas, "--thetas")
    if args.n_max < 1:
        raise InputError("--n-max must be at least 1")
    rows = []
    for theta in thetas:
        for n in range(1, args.n_max + 1):
            built = policy_mod.distance_threshold_policy(values, theta, n)
            report = bounds_mod.unconstrained_audit(built, args.epsilon)
            rows.append(
                (
                    n,
                    theta,
                    args.epsilon,
                    report.component_count,
                    report.max_diameter,
                    report.leakage_upper_bits,
                    None,
                    None,
                )
            )
    _write_output(args.out, render_csv(FIGURE_COLUMNS, rows))
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomised steps")
    common.add_argument(
        "--max-databases",
        type=int,
        default=None,
        help=f"cap on materialised databases (default 100000, env {ENV_MAX_DATABASES})",
    )
    common.add_argument(
        "--max-group",
        type=int,
        default=graphcore.DEFAULT_GROUP_CAP,
        help="cap on enumerated group elements",
    )

    parser = argparse.ArgumentParser(
        prog="blowfish",
        description="Blowfish privacy policies, adjacency graphs, and leakage bounds",
    )
    top = parser.add_subparsers(dest="command", required=True)

    policy_parser = top.add_parser("policy", help="build or validate policy documents")
    policy_sub = policy_parser.add_subparsers(dest="subcommand", required=True)

    build = policy_sub.add_parser("build", parents=[common], help="construct a policy")
    build.add_argument(
        "--kind",
        required=True,
        choices=["distance-threshold", "cycle", "complete", "custom"],
    )
    build.add_argument("--values", help="comma-separated numeric tuple values")
    build.add_argument("--theta", type=float, help="distance threshold")
    build.add_argument("--m", type=int, help="universe size for cycle/complete")
    build.add_argument("--tuples", help="comma-separated labels for custom policies")
    build.add_argument("--edges", help="secret edges as 'a:b,c:d' for custom policies")
    build.add_argument("--n", type=int, required=True, help="records per database")
    build.add_argument(
        "--permissible",
        default="all",
        help="'all' or a path to a JSON list of databases",
    )
    build.add_argument("--out", help="output path (stdout when omitted)")
    build.set_defaults(handler=_cmd_policy_build)

    validate = policy_sub.add_parser("validate", parents=[common], help="validate a policy document")
    validate.add_argument("document", help="policy JSON path")
    validate.set_defaults(handler=_cmd_policy_validate)

    adjacency_parser = top.add_parser("adjacency", help="induce adjacency graphs")
    adjacency_sub = adjacency_parser.add_subparsers(dest="subcommand", required=True)
    induce = adjacency_sub.add_parser("induce", parents=[common])
    induce.add_argument("policy", help="policy JSON path")
    induce.add_argument("--method", default="auto", choices=["auto", "fast", "definition"])
    induce.add_argument("--out", help="graph JSON output path")
    induce.set_defaults(handler=_cmd_adjacency_induce)

    bound_parser = top.add_parser("bound", help="evaluate leakage and min-entropy bounds")
    bound_sub = bound_parser.add_subparsers(dest="subcommand", required=True)
    compute = bound_sub.add_parser("compute", parents=[common])
    compute.add_argument("policy", help="policy JSON path")
    compute.add_argument("--epsilon", type=float, required=True)
    compute.add_argument("--channel", help="channel CSV to audit against the bounds")
    compute.add_argument("--out", help="report output path")
    compute.set_defaults(handler=_cmd_bound_compute)

    channel_parser = top.add_parser("channel", help="verify, measure, or generate channels")
    channel_sub = channel_parser.add_subparsers(dest="subcommand", required=True)

    verify = channel_sub.add_parser("verify", parents=[common])
    verify.add_argument("channel", help="channel CSV path")
    verify.add_argument("--policy", help="policy JSON (adjacency graph is induced)")
    verify.add_argument("--graph", help="graph JSON path")
    verify.add_argument("--epsilon", type=float, help="target privacy level")
    verify.add_argument("--out", help="report output path")
    verify.set_defaults(handler=_cmd_channel_verify)

    leak = channel_sub.add_parser("leakage", parents=[common])
    leak.add_argument("channel", help="channel CSV path")
    leak.add_argument("--prior", help="JSON list of prior probabilities")
    leak.add_argument("--out", help="report output path")
    leak.set_defaults(handler=_cmd_channel_leakage)

    generate = channel_sub.add_parser("generate", parents=[common])
    generate.add_argument("--policy", help="policy JSON (adjacency graph is induced)")
    generate.add_argument("--graph", help="graph JSON path")
    generate.add_argument("--epsilon", type=float, required=True)
    generate.add_argument(
        "--shuffle-outputs",
        action="store_true",
        help="apply a seeded random permutation of output columns",
    )
    generate.add_argument("--out", help="channel CSV output path")
    generate.set_defaults(handler=_cmd_channel_generate)

    symmetrise_parser = top.add_parser("symmetrise", help="run the channel symmetrisation pipeline")
    symmetrise_sub = symmetrise_parser.add_subparsers(dest="subcommand", required=True)
    run = symmetrise_sub.add_parser("run", parents=[common])
    run.add_argument("channel", help="channel CSV path")
    run.add_argument("--policy", help="policy JSON (adjacency graph is induced)")
    run.add_argument("--graph", help="graph JSON path")
    run.add_argument("--group", default="full", choices=["full", "lifted", "trivial"])
    run.add_argument("--vertex-cap", type=int, default=graphcore.DEFAULT_VERTEX_CAP)
    run.add_argument("--strategy", default="full", choices=["full", "orbit"])
    run.add_argument("--cross-check", action="store_true")
    run.add_argument("--out-grouped", help="CSV path for the column-grouped channel")
    run.add_argument("--out-averaged", help="CSV path for the group-averaged channel")
    run.add_argument("--out", help="report output path")
    run.set_defaults(handler=_cmd_symmetrise_run)

    tightness_parser = top.add_parser("tightness", help="sharpness-family sweeps")
    tightness_sub = tightness_parser.add_subparsers(dest="subcommand", required=True)
    sweep = tightness_sub.add_parser("sweep", parents=[common])
    sweep.add_argument("--n", required=True, help="comma-separated component counts (each >= 2)")
    sweep.add_argument("--delta", required=True, help="comma-separated positive deltas")
    sweep.add_argument("--out", help="CSV output path")
    sweep.set_defaults(handler=_cmd_tightness_sweep)

    figure_parser = top.add_parser("figure", help="figure-reproduction CSVs")
    figure_sub = figure_parser.add_subparsers(dest="subcommand", required=True)
    bound_sweep = figure_sub.add_parser("bound-sweep", parents=[common])
    bound_sweep.add_argument("--values", default="1,2,3,4")
    bound_sweep.add_argument("--thetas", default="1,2,3")
    bound_sweep.add_argument("--n-max", type=int, default=8)
    bound_sweep.add_argument("--epsilon", type=float, default=0.1)
    bound_sweep.add_argument("--out", help="CSV output path")
    bound_sweep.set_defaults(handler=_cmd_figure_bound_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON input ({exc})", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
