"""Command-line surface.

Exit codes: 0 success/pass, 1 usage or input error, 2 an asserted check or
certificate failed (details printed), 3 a conjecture scan found a
counterexample (certificate printed).
"""

import argparse
import json
import sys

from .model import (
    FormatError,
    Graph,
    REGULAR,
    ShapeError,
    SigmaGameError,
    build_family,
    chi,
    config_to_string,
    light_number,
    parse_instance,
    replay,
    serialize_instance,
)
from .search import (
    gap_profile,
    ml_litonly,
    ml_regular,
    verify_ml_witness,
    verify_mlstar_witness,
)
from . import constructive, survey

DEFAULT_CLI_CAP = 20


def _load_instance(args, need_config=True):
    if getattr(args, "instance", None):
        with open(args.instance, "r", encoding="utf-8") as fh:
            g, x = parse_instance(fh.read())
    elif getattr(args, "family", None):
        g, x = _parse_family(args.family)
        if getattr(args, "loops", None):
            mask = chi(int(s) - 1 for s in args.loops.split(","))
            g = g.with_loops(mask)
    else:
        raise FormatError("provide --instance or --family")
    if getattr(args, "config", None):
        from .model import config_from_string

        if len(args.config) != g.n:
            raise FormatError("--config length must equal the vertex count")
        x = config_from_string(args.config)
    if need_config and x is None:
        raise FormatError("instance carries no configuration; pass --config")
    return g, x


def _parse_family(spec: str):
    kind, _, rest = spec.partition(":")
    params = [int(p) for p in rest.split(",") if p] if rest else []
    return build_family(kind, *params)


def _emit(args, data, text_lines):
    if args.format == "json":
        out = json.dumps(data, sort_keys=True, indent=2) + "\n"
    else:
        out = "\n".join(text_lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


def _cmd_ml(args):
    g, x = _load_instance(args)
    res = ml_regular(g, x, cap=args.cap)
    if not verify_ml_witness(g, x, res):
        raise SigmaGameError("witness failed replay verification")
    data = {
        "ml": res.value,
        "witness_config": config_to_string(res.witness_config, g.n),
        "move_set": [v + 1 for v in res.move_set],
    }
    lines = [f"ml {res.value}"]
    if args.witness:
        lines.append(f"witness {data['witness_config']}")
        lines.append("moves " + " ".join(str(v) for v in data["move_set"]))
    return 0, data, lines


def _cmd_mlstar(args):
    g, x = _load_instance(args)
    res = ml_litonly(g, x, cap=args.cap)
    if not verify_mlstar_witness(g, x, res):
        raise SigmaGameError("witness failed replay verification")
    data = {
        "mlstar": res.value,
        "witness_config": config_to_string(res.witness_config, g.n),
        "sequence": [v + 1 for v in res.sequence],
    }
    lines = [f"mlstar {res.value}"]
    if args.witness:
        lines.append(f"witness {data['witness_config']}")
        lines.append("sequence " + " ".join(str(v) for v in data["sequence"]))
    return 0, data, lines


def _cmd_gap(args):
    g, x = _load_instance(args, need_config=False)
    if x is not None and not args.graph:
        r = ml_regular(g, x, cap=args.cap)
        s = ml_litonly(g, x, cap=args.cap)
        data = {
            "ml": r.value,
            "mlstar": s.value,
            "gap": s.value - r.value,
            "witness_config": config_to_string(s.witness_config, g.n),
            "move_set": [v + 1 for v in r.move_set],
            "sequence": [v + 1 for v in s.sequence],
        }
        lines = [f"ml {r.value}", f"mlstar {s.value}", f"gap {s.value - r.value}"]
        return 0, data, lines
    prof = gap_profile(g, cap=args.cap)
    data = {
        "graph_ml": prof.graph_ml,
        "graph_mlstar": prof.graph_mlstar,
        "graph_gap": prof.graph_mlstar - prof.graph_ml,
        "max_config_gap": prof.max_config_gap,
        "gap_config": config_to_string(prof.gap_config, g.n),
        "ml_config": config_to_string(prof.ml_config, g.n),
        "mlstar_config": config_to_string(prof.mlstar_config, g.n),
    }
    lines = [
        f"graph_ml {prof.graph_ml}",
        f"graph_mlstar {prof.graph_mlstar}",
        f"max_config_gap {prof.max_config_gap} at {data['gap_config']}",
    ]
    return 0, data, lines


def _cert_payload(cert, n):
    return {
        "bound": cert.bound,
        "ml": cert.ml,
        "final_light": cert.final_light,
        "sequence": [v + 1 for v in cert.sequence],
        "final_config": config_to_string(cert.final_config, n),
    }


def _cmd_solve(args):
    g, x = _load_instance(args)
    if args.method == "tree":
        cert = constructive.solve_tree(g, x, cap=args.cap)
    elif args.method == "pendant-paths":
        if not (args.pivot and args.path1 and args.path2):
            raise FormatError("pendant-paths needs --pivot, --path1, --path2")
        pivot = args.pivot - 1
        p1 = [int(s) - 1 for s in args.path1.split(",")]
        p2 = [int(s) - 1 for s in args.path2.split(",")]
        cert = constructive.solve_pendant_paths(g, pivot, p1, p2, x)
    elif args.method == "planted":
        if not args.part2 or args.pivot is None:
            raise FormatError("planted needs --part2 and --pivot")
        part2 = frozenset(int(s) - 1 for s in args.part2.split(","))
        pivot = args.pivot - 1
        part1 = frozenset(range(g.n)) - part2 | {pivot}
        cert = constructive.solve_planted_tree(g, (part1, part2, pivot), x,
                                               cap=args.cap)
    else:
        raise FormatError(f"unknown method {args.method!r}")
    data = _cert_payload(cert, g.n)
    lines = [
        f"bound {cert.bound}",
        f"ml {cert.ml}",
        f"final_light {cert.final_light}",
        f"final {data['final_config']}",
        "sequence " + " ".join(str(v) for v in data["sequence"]),
    ]
    return 0, data, lines


def _cmd_normalize(args):
    g, x = _load_instance(args)
    if args.shape == "path":
        top = args.top - 1 if args.top else None
        order = None
        if top is not None:
            order = constructive._path_order(g, range(g.n))
            if order[0] != top:
                if order[-1] != top:
                    raise ShapeError("--top must be a path endpoint")
                order = tuple(reversed(order))
        seq, final = constructive.path_normalize(g, x, order)
    else:
        rv = constructive.rake_view(g, top=args.top - 1 if args.top else None)
        move_set = []
        if args.move_set:
            move_set = [int(s) - 1 for s in args.move_set.split(",")]
        seq, final = constructive.rake_normalize(rv, x, move_set)
    data = {
        "sequence": [v + 1 for v in seq],
        "final_config": config_to_string(final, g.n),
        "final_light": light_number(final),
    }
    lines = [
        f"final {data['final_config']}",
        f"final_light {data['final_light']}",
        "sequence " + " ".join(str(v) for v in data["sequence"]),
    ]
    return 0, data, lines


def _cmd_scan(args):
    report = survey.scan(
        args.check,
        family=args.family,
        max_n=args.max_n,
        jobs=args.jobs,
        cap=args.cap,
        timing=args.timing,
    )
    payload = json.loads(report.to_json(timing=args.timing))
    lines = [
        f"check {report.check}: {report.status}",
        f"instances_checked {report.instances_checked}",
        f"max_config_gap {report.max_config_gap}",
        f"max_graph_gap {report.max_graph_gap}",
        f"violations {len(report.violations)}",
    ]
    code = 0
    if report.status == "fail":
        code = 2
    elif report.status == "finding":
        code = 3
    return code, payload, lines


def _cmd_reproduce(args):
    rep = survey.reproduce_example(args.example, m=args.m)
    lines = [f"example {rep['example']}" + (f" m={rep['m']}" if rep["m"] else "")]
    for c in rep["checks"]:
        mark = "ok" if c["match"] else "MISMATCH"
        lines.append(
            f"  {c['quantity']}: computed {c['computed']} expected {c['expected']} {mark}"
        )
    lines.append("PASS" if rep["ok"] else "FAIL")
    return (0 if rep["ok"] else 2), rep, lines


def _cmd_enumerate(args):
    graphs = survey.enumerate_family(args.family, args.n)
    texts = [serialize_instance(g) for g in graphs]
    data = {"family": args.family, "n": args.n, "count": len(texts),
            "instances": texts}
    lines = [f"count {len(texts)}", ""]
    lines += [t.rstrip("\n") + "\n" for t in texts]
    return 0, data, lines


def _cmd_replay(args):
    g, x = _load_instance(args)
    moves = [int(s) - 1 for s in args.moves.replace(",", " ").split()]
    if args.regular:
        seq = [(v, REGULAR) for v in moves]
    else:
        seq = moves
    final = replay(g, x, seq, strict=args.verify)
    data = {
        "final_config": config_to_string(final, g.n),
        "final_light": light_number(final),
        "strict": bool(args.verify),
    }
    lines = [f"final {data['final_config']}", f"final_light {data['final_light']}"]
    return 0, data, lines


def _add_io(p, config=True):
    p.add_argument("--instance", help="instance file path")
    p.add_argument("--family", help="family spec, e.g. fig2 or rake:3,2")
    p.add_argument("--loops", help="1-based loop vertices for --family, comma separated")
    if config:
        p.add_argument("--config", help="override configuration bitstring")
    p.add_argument("--cap", type=int, default=DEFAULT_CLI_CAP,
                   help="state/rank cap for exact sweeps")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out", help="write output to a file instead of stdout")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="sigmagame",
        description="Exact and certified solvers for the sigma-game and its "
                    "lit-only restriction on graphs with loops.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ml", help="minimum light number, unrestricted moves")
    _add_io(p)
    p.add_argument("--witness", action="store_true")
    p.set_defaults(fn=_cmd_ml)

    p = sub.add_parser("mlstar", help="minimum light number, lit-only moves")
    _add_io(p)
    p.add_argument("--witness", action="store_true")
    p.set_defaults(fn=_cmd_mlstar)

    p = sub.add_parser("gap", help="per-configuration or per-graph gap report")
    _add_io(p)
    p.add_argument("--graph", action="store_true",
                   help="force the whole-graph profile")
    p.set_defaults(fn=_cmd_gap)

    p = sub.add_parser("solve", help="emit a certified lit-only sequence")
    _add_io(p)
    p.add_argument("--method", choices=["tree", "pendant-paths", "planted"],
                   required=True)
    p.add_argument("--pivot", type=int, help="1-based pivot vertex")
    p.add_argument("--path1", help="1-based pendant path, pivot side first")
    p.add_argument("--path2", help="second pendant path")
    p.add_argument("--part2", help="1-based vertices of the attached part "
                                   "(planted), including the pivot")
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("normalize", help="run a normalization engine")
    _add_io(p)
    p.add_argument("--shape", choices=["path", "rake"], required=True)
    p.add_argument("--top", type=int, help="1-based protected top vertex")
    p.add_argument("--move-set", dest="move_set",
                   help="1-based regular move set to track (rake)")
    p.set_defaults(fn=_cmd_normalize)

    p = sub.add_parser("scan", help="exhaustive family verification")
    p.add_argument("--check", required=True, choices=sorted(survey.CHECKS))
    p.add_argument("--family", choices=["trees", "unicyclic", "grid",
                                        "all_graphs", "rakes", "planted"])
    p.add_argument("--max-n", dest="max_n", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--cap", type=int, default=DEFAULT_CLI_CAP)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_scan)

    p = sub.add_parser("reproduce", help="re-derive a worked example exactly")
    p.add_argument("--example", required=True,
                   choices=["tripartite", "complete", "fig1", "fig2"])
    p.add_argument("--m", type=int)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_reproduce)

    p = sub.add_parser("enumerate", help="list canonical family members")
    p.add_argument("--family", required=True,
                   choices=["trees", "unicyclic", "grid", "all_graphs", "rakes"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_enumerate)

    p = sub.add_parser("replay", help="replay a move sequence")
    _add_io(p)
    p.add_argument("--moves", required=True,
                   help="1-based vertices, space or comma separated")
    p.add_argument("--regular", action="store_true",
                   help="treat moves as unrestricted instead of lit-only")
    p.add_argument("--verify", action="store_true",
                   help="fail on any lit-only move at an off vertex")
    p.set_defaults(fn=_cmd_replay)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    try:
        code, data, lines = args.fn(args)
    except (SigmaGameError, ValueError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2 if isinstance(e, SigmaGameError) and not isinstance(
            e, (FormatError, ShapeError)) else 1
    _emit(args, data, lines)
    return code


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
