"""Command-line entry point: one subcommand per module plus ``experiment``.

Examples::

    approxring ring --ring "{kind: zmod, n: 7}" --op add --a 5 --b 4
    approxring approx constant --ring "{kind: integers}" --interval -4 4 --mode exact
    approxring cutproject stats --d 2 --w 1 --R 100
    approxring growth series --ring "{kind: integers}" --elements="-1;0;1" --n-max 12 --format csv
    approxring experiment config.yaml --out results/

Exit status: 0 on success (truncated or inconclusive results included),
2 on structural errors (bad specs, bad sets, unmet preconditions).
Element lists starting with a minus sign need the ``--elements=...`` form.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np
import yaml

from . import approx, cutproject, escape, growth, structure
from .errors import ApproxRingError, BudgetExceeded
from .experiment import load_config, run_experiment
from .report import envelope, render
from .ring import arith, make_ring
from .setops import (
    ElementSet,
    alg_set,
    cover_number,
    difference_set,
    interval,
    iterate_xn,
    load_set,
    nm_difference,
    parse_set_text,
    productset,
    random_symmetric,
    sumset,
    word_ball,
)

__all__ = ["main", "build_parser"]


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def _ring_arg(text: str):
    """A ring spec given inline (YAML/JSON) or as a path to a spec file."""
    if os.path.exists(text):
        with open(text, encoding="utf-8") as fh:
            text = fh.read()
    return make_ring(text)


def _rat(text: str) -> Fraction:
    return Fraction(text)


def _add_ring(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--ring", required=required, help="ring spec: inline YAML/JSON or a spec file")


def _add_set(p: argparse.ArgumentParser, prefix: str = "", label: str = "X"):
    g = p.add_argument_group(f"set {label}")
    dest = prefix.replace("-", "_")
    g.add_argument(f"--{prefix}set", dest=f"{dest}set_file", help=f"{label} from a set file (one element per line)")
    g.add_argument(f"--{prefix}elements", dest=f"{dest}elements", help=f"{label} as ';'-separated encodings")
    g.add_argument(f"--{prefix}interval", dest=f"{dest}interval", nargs=2, type=int, metavar=("LO", "HI"))
    if not prefix:
        g.add_argument("--random", type=int, metavar="SIZE", help="random symmetric X of this size (uses --seed)")


def _get_set(args, ring, prefix: str = "", required: bool = True) -> ElementSet | None:
    if getattr(args, f"{prefix}set_file", None):
        return load_set(getattr(args, f"{prefix}set_file"), ring)
    if getattr(args, f"{prefix}elements", None):
        return parse_set_text(getattr(args, f"{prefix}elements").replace(";", "\n"), ring)
    if getattr(args, f"{prefix}interval", None):
        lo, hi = getattr(args, f"{prefix}interval")
        return interval(ring, lo, hi)
    if not prefix and getattr(args, "random", None):
        return random_symmetric(ring, args.random, np.random.default_rng(np.random.SeedSequence([args.seed, 0])))
    if required:
        raise ValueError(f"no {'set' if not prefix else prefix.rstrip('_') + ' set'} given")
    return None


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_ring(args):
    ring = _ring_arg(args.ring)
    out = {"ring": ring.spec, "description": ring.describe(), "finite": ring.finite}
    if ring.finite:
        out["size"] = ring.size
        out["additive_exponent"] = ring.exponent
        if args.list:
            out["elements"] = [ring.encode(x) for x in sorted(ring.elements(), key=ring.sort_key)]
    if args.op:
        a = ring.decode(args.a)
        b = None if args.b is None else ring.decode(args.b)
        out["arith"] = {"op": args.op, "a": args.a, "b": args.b, "value": str(arith(ring, args.op, a, b))}
    return out


def cmd_set(args):
    ring = _ring_arg(args.ring)
    X = _get_set(args, ring)
    op = args.action
    if op == "sum":
        S = sumset(X, X)
    elif op == "product":
        S = productset(X, X)
    elif op == "difference":
        S = difference_set(X)
    elif op == "nm":
        S = nm_difference(X, args.n, args.m)
    elif op == "xn":
        S = iterate_xn(X, args.n)
    elif op == "ball":
        S = word_ball(ring, X, args.n)
    elif op == "alg":
        S = alg_set(ring, X, args.n)
    elif op == "cover":
        target = _get_set(args, ring, "target_", required=False)
        if target is None:
            target = sumset(X, X) | productset(X, X)
        return cover_number(target, X, mode=args.mode, budget_nodes=args.budget_nodes)
    else:  # pragma: no cover - argparse restricts the choices
        raise ValueError(op)
    return {"operation": op, "size": len(S), "truncated": S.truncated, "set": S}


def cmd_approx(args):
    ring = _ring_arg(args.ring)
    X = _get_set(args, ring)
    Y = _get_set(args, ring, "with_", required=False)
    op, nodes = args.action, args.budget_nodes
    if op == "constant":
        return approx.approx_constant(X, mode=args.mode, budget_nodes=nodes)
    if op == "commensurability":
        if Y is None:
            raise ValueError("commensurability needs a second set (--with-set/--with-elements)")
        a, b = approx.commensurability(X, Y, mode=args.mode, budget_nodes=nodes)
        return {"X_by_Y": a, "Y_by_X": b}
    if op == "thickness":
        Y = ElementSet.universe(ring) if Y is None else Y
        res = approx.thickness(X, Y, mode=args.mode, budget_nodes=nodes)
        out = res.to_dict()
        if res.exactness == "exact":
            out["bound_holds"] = approx.remark_bound_holds(X, Y, res)
        return out
    if op == "bounds":
        return {"checks": approx.bound_suite(X, budget_nodes=nodes)}
    if op == "dichotomy":
        return approx.dichotomy_report(X, mode=args.mode, budget_nodes=nodes)
    raise ValueError(op)


def cmd_structure(args):
    ring = _ring_arg(args.ring)
    X = _get_set(args, ring)
    op = args.action
    if op == "subring":
        R = structure.generated_subring(X)
        return {"size": len(R), "set": R}
    if op == "verify":
        parent = _get_set(args, ring, "with_", required=False)
        res = structure.verify_substructure(args.kind, X, parent)
        return {"kind": args.kind, "ok": res.ok, "message": res.message, "witness": res.witness}
    if op == "class":
        return {"class": structure.nilpotency_class(structure.generated_subring(X), args.class_max)}
    if op == "base":
        base = structure.nilpotent_base(structure.generated_subring(X), args.n)
        return {"base": None if base is None else [ring.encode(u) for u in base]}
    if op == "certificate":
        cert = structure.nilpotent_certificate(X, m_max=args.m_max, class_max=args.class_max)
        return {"status": "none within bounds"} if cert is None else cert
    raise ValueError(op)


def cmd_escape(args):
    ring = _ring_arg(args.ring)
    X = _get_set(args, ring)
    op = args.action
    if op == "norms":
        elems = structure.generated_subring(X).sorted() if ring.finite else X.sorted()
        table = escape.norm_table(X, elems)
        rows = [[ring.encode(x), str(v.value)] for x, v in table.items()]
        return {"table": {"header": ["element", "norm"], "rows": rows}}
    if op == "zero-set":
        Z0 = escape.norm_zero_set(X)
        return {"set": Z0, "is_ideal": escape.norm_zero_is_ideal(X)}
    if op == "check":
        return escape.strong_norm_check(X, sample_budget=args.sample_budget, seed=args.seed)
    raise ValueError(op)


def _cloud(args) -> cutproject.PointCloud:
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            return cutproject.model_set(yaml.safe_load(fh), budget_points=args.budget_points)
    return cutproject.pisot_window(args.d, args.w, args.R, budget_points=args.budget_points)


def cmd_cutproject(args):
    op = args.action
    if op == "algebra":
        basis = yaml.safe_load(args.basis)
        cloud, rep = cutproject.algebra_model_set(
            args.d, args.w, args.R, basis, args.margin, seed=args.seed, budget_points=args.budget_points
        )
        _write_cloud_files(args, cloud)
        return {"points": len(cloud.points), "closure": rep}
    if op == "commensurability":
        a, b = cutproject.window_commensurability(
            args.d, args.w1, args.w2, args.R, args.margin or 0, mode=args.mode,
            budget_nodes=args.budget_nodes, budget_points=args.budget_points,
        )
        return {"w1_by_w2": a, "w2_by_w1": b}
    cloud = _cloud(args)
    _write_cloud_files(args, cloud)
    if op == "generate":
        return {"points": len(cloud.points), "provenance": cloud.provenance}
    if op == "stats":
        return cutproject.cloud_stats(cloud, args.margin)
    if op == "approx":
        return cutproject.approx_check_cloud(cloud, args.margin or 0, mode=args.mode, budget_nodes=args.budget_nodes)
    if op == "span-ideal":
        if not args.structure_constants:
            raise ValueError("span-ideal needs --structure-constants")
        return cutproject.span_ideal(cloud, yaml.safe_load(args.structure_constants), seed=args.seed)
    raise ValueError(op)


def _write_cloud_files(args, cloud):
    if args.cloud_out:
        cutproject.write_cloud(cloud, args.cloud_out)
    if args.svg:
        cutproject.write_cloud_svg(cloud, args.svg)


def cmd_growth(args):
    ring = _ring_arg(args.ring)
    X = _get_set(args, ring)
    op = args.action
    if op == "report":
        return growth.gromov_report(
            ring, X, args.n_max, args.class_max, args.d, args.N, args.quotient_modulus, args.max_elements
        )
    series = growth.growth_series(ring, X, args.n_max, args.max_elements)
    out = series.to_dict()
    out["table"] = {"header": ["n", "size"], "rows": [[n, s] for n, s in enumerate(series.sizes)]}
    if op == "fit":
        out["fit"] = growth.fit_degree(series, args.tail_fraction)
    elif op == "scale":
        out["n_prime"] = growth.scale_finder(series, args.d or 1, args.N)
    return out


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


_GLOBAL_DEFAULTS = {
    "seed": 0,
    "budget_nodes": 10**6,
    "budget_points": cutproject.DEFAULT_POINT_BUDGET,
    "out": None,
    "format": "structured",
}


def _add_globals(p: argparse.ArgumentParser, default):
    """Global flags, accepted before or after the subcommand."""
    p.add_argument("--seed", type=int, default=default, help="master seed for every randomized step")
    p.add_argument("--budget-nodes", type=int, default=default, help="node budget for exact searches")
    p.add_argument("--budget-points", type=int, default=default, help="point budget for cloud enumeration")
    p.add_argument("--out", default=default, help="write the report here (a directory for 'experiment')")
    p.add_argument("--format", choices=["structured", "csv", "text"], default=default)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="approxring", description="Approximate subrings laboratory.", allow_abbrev=False
    )
    _add_globals(p, argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    _add_globals(common, argparse.SUPPRESS)

    def add(name, help):
        return sub.add_parser(name, help=help, parents=[common], allow_abbrev=False)

    r = add("ring", "describe a ring, list its elements, evaluate one operation")
    _add_ring(r)
    r.add_argument("--list", action="store_true", help="list the elements of a finite ring")
    r.add_argument("--op", choices=["add", "mul", "neg", "sub"])
    r.add_argument("--a")
    r.add_argument("--b")
    r.set_defaults(func=cmd_ring)

    s = add("set", "sumsets, product sets, X_n, word balls, Alg_n, covers")
    s.add_argument("action", choices=["sum", "product", "difference", "nm", "xn", "ball", "alg", "cover"])
    _add_ring(s)
    _add_set(s)
    _add_set(s, "target-", "target for cover")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--mode", choices=["greedy", "exact"], default="greedy")
    s.set_defaults(func=cmd_set)

    a = add("approx", "approximate constants, commensurability, thickness, bounds")
    a.add_argument("action", choices=["constant", "commensurability", "thickness", "bounds", "dichotomy"])
    _add_ring(a)
    _add_set(a)
    _add_set(a, "with-", "Y (second set)")
    a.add_argument("--mode", choices=["greedy", "exact"], default="greedy")
    a.set_defaults(func=cmd_approx)

    st = add("structure", "generated subrings, nilpotency class, bases, certificates")
    st.add_argument("action", choices=["subring", "verify", "class", "base", "certificate"])
    _add_ring(st)
    _add_set(st)
    _add_set(st, "with-", "parent")
    st.add_argument("--kind", choices=["subring", "ideal"], default="subring")
    st.add_argument("--class-max", type=int, default=8)
    st.add_argument("--m-max", type=int, default=3)
    st.add_argument("--n", type=int, default=3, help="base length")
    st.set_defaults(func=cmd_structure)

    e = add("escape", "escape norms and the strong-norm checker")
    e.add_argument("action", choices=["norms", "zero-set", "check"])
    _add_ring(e)
    _add_set(e)
    e.add_argument("--sample-budget", type=int, default=200_000)
    e.set_defaults(func=cmd_escape)

    c = add("cutproject", "Pisot windows, model sets, cloud statistics and covers")
    c.add_argument("action", choices=["generate", "stats", "approx", "commensurability", "algebra", "span-ideal"])
    c.add_argument("--spec", help="model-set spec file (YAML/JSON); default is the Pisot window")
    c.add_argument("--d", type=int, default=2)
    c.add_argument("--w", type=_rat, default=Fraction(1))
    c.add_argument("--R", type=_rat, default=Fraction(50))
    c.add_argument("--w1", type=_rat, default=Fraction(1))
    c.add_argument("--w2", type=_rat, default=Fraction(2))
    c.add_argument("--margin", type=_rat)
    c.add_argument("--mode", choices=["greedy", "exact"], default="greedy")
    c.add_argument("--basis", help="YAML list of square rational matrices (algebra)")
    c.add_argument("--structure-constants", help="YAML c[i][j] coefficient lists (span-ideal)")
    c.add_argument("--cloud-out", help="write the points (exact coordinates) here")
    c.add_argument("--svg", help="write a point plot here (1D/2D)")
    c.set_defaults(func=cmd_cutproject)

    g = add("growth", "word-ball growth series, degree fit, scale search, report")
    g.add_argument("action", choices=["series", "fit", "scale", "report"])
    _add_ring(g)
    _add_set(g)
    g.add_argument("--n-max", type=int, default=12)
    g.add_argument("--max-elements", type=int)
    g.add_argument("--tail-fraction", type=float, default=0.5)
    g.add_argument("--d", type=_rat)
    g.add_argument("--N", type=int, default=1)
    g.add_argument("--class-max", type=int, default=8)
    g.add_argument("--quotient-modulus", type=int, help="certify in the quotient with entries mod this")
    g.set_defaults(func=cmd_growth)

    x = add("experiment", "run a YAML experiment config")
    x.add_argument("config")
    x.add_argument("--workers", type=int, help="override the config's worker count")
    x.set_defaults(func=None)
    return p


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        if args.command == "experiment":
            config = load_config(args.config)
            report, status = run_experiment(config, args.out, args.workers)
            if args.out is None:
                _emit(render(report, args.format), None)
            return status
        try:
            result = args.func(args)
        except BudgetExceeded as exc:
            result = {"status": "truncated", "error": str(exc), "reached": exc.reached}
        report = envelope(args.command, _config(args), result)
        _emit(render(report, args.format), args.out)
        return 0
    except (ApproxRingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
