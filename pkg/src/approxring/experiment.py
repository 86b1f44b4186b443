"""Experiment configs: a ring, a generator recipe, a corpus size and an ordered
pipeline of operations, run deterministically and reported with provenance.

A config is a YAML (or JSON) document::

    seed: 7
    ring: {kind: zmod, n: 101}
    generator: {recipe: random_symmetric, size: 10}
    corpus: 5
    pipeline:
      - op: approx_constant
        mode: exact
      - op: dichotomy_report
    outputs: {report: report.json, summary: summary.txt}
    budgets: {nodes: 100000, points: 2000000}
    workers: 2

Every corpus item draws its randomness from ``SeedSequence([seed, index])``,
so results do not depend on the worker count.  Operations never write files;
they return artifacts that the orchestrator writes after merging results in
item order.
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from . import approx, cutproject, escape, growth, structure
from .errors import ApproxRingError, BudgetExceeded, ConfigError
from .report import envelope, jsonable, to_json, to_text
from .ring import Ring, make_ring
from .setops import ElementSet, cover_number, interval, iterate_xn, productset, random_symmetric, sumset, word_ball

__all__ = ["ExperimentConfig", "parse_config", "load_config", "run_experiment", "OPERATIONS", "RECIPES"]

TOP_KEYS = {"seed", "ring", "generator", "corpus", "pipeline", "outputs", "budgets", "workers"}
RECIPES = {
    "explicit": {"elements"},
    "random_symmetric": {"size"},
    "interval": {"lo", "hi"},
    "ideal": {"generators"},
}


@dataclasses.dataclass
class ExperimentConfig:
    seed: int
    ring: dict | None
    generator: dict | None
    corpus: int
    pipeline: list
    outputs: dict
    budgets: dict
    workers: int

    def resolved(self) -> dict:
        return dataclasses.asdict(self)


# ---------------------------------------------------------------------------
# parsing with positions
# ---------------------------------------------------------------------------


def _positions(node, path=(), out=None) -> dict:
    """Map key paths to 'line:col' of the node they refer to (1-based)."""
    out = {} if out is None else out
    out[path] = f"{node.start_mark.line + 1}:{node.start_mark.column + 1}"
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            key = k.value
            out[path + (key, "<key>")] = f"{k.start_mark.line + 1}:{k.start_mark.column + 1}"
            _positions(v, path + (key,), out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            _positions(v, path + (i,), out)
    return out


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Parse and validate a config; every error carries 'source:line:col'."""
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        pos = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark else source
        raise ConfigError(f"config does not parse: {getattr(exc, 'problem', exc)}", pos) from exc
    if node is None or not isinstance(data, dict):
        raise ConfigError("config must be a mapping", f"{source}:1:1")
    pos = _positions(node)

    def at(*path) -> str:
        while path and path not in pos:
            path = path[:-1]
        return f"{source}:{pos.get(path, '1:1')}"

    for key in data:
        if key not in TOP_KEYS:
            raise ConfigError(f"unknown top-level key {key!r}", at(key, "<key>"))

    def int_field(key, default, minimum):
        v = data.get(key, default)
        if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
            raise ConfigError(f"{key} must be an integer >= {minimum}", at(key))
        return v

    seed = int_field("seed", 0, 0)
    if seed >= 2**64:
        raise ConfigError("seed must fit in 64 bits", at("seed"))
    corpus = int_field("corpus", 1, 1)
    workers = int_field("workers", 1, 1)

    ring = data.get("ring")
    if ring is not None:
        try:
            make_ring(ring)
        except ApproxRingError as exc:
            raise ConfigError(f"bad ring spec: {exc}", at("ring")) from exc

    gen = data.get("generator")
    if gen is not None:
        if not isinstance(gen, dict) or gen.get("recipe") not in RECIPES:
            raise ConfigError(f"generator.recipe must be one of {sorted(RECIPES)}", at("generator", "recipe"))
        missing = RECIPES[gen["recipe"]] - set(gen)
        if missing:
            raise ConfigError(f"recipe {gen['recipe']} needs {sorted(missing)}", at("generator"))
        if ring is None:
            raise ConfigError("a generator needs a ring", at("generator"))

    pipeline = data.get("pipeline")
    if not isinstance(pipeline, list) or not pipeline:
        raise ConfigError("pipeline must be a non-empty list of operations", at("pipeline"))
    for i, step in enumerate(pipeline):
        if not isinstance(step, dict) or "op" not in step:
            raise ConfigError("each pipeline step needs an 'op'", at("pipeline", i))
        name = step["op"]
        if name not in OPERATIONS:
            raise ConfigError(f"unknown operation {name!r}", at("pipeline", i, "op"))
        op = OPERATIONS[name]
        for p in step:
            if p != "op" and p not in op.params:
                raise ConfigError(f"operation {name} has no parameter {p!r}", at("pipeline", i, p, "<key>"))
        if op.needs_set and gen is None:
            raise ConfigError(f"operation {name} needs a generator", at("pipeline", i, "op"))

    outputs = data.get("outputs") or {}
    budgets = data.get("budgets") or {}
    if not isinstance(outputs, dict):
        raise ConfigError("outputs must be a mapping", at("outputs"))
    if not isinstance(budgets, dict) or set(budgets) - {"nodes", "points", "elements"}:
        raise ConfigError("budgets may set nodes, points, elements", at("budgets"))
    return ExperimentConfig(seed, ring, gen, corpus, pipeline, outputs, budgets, workers)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


@dataclasses.dataclass
class _Context:
    ring: Ring | None
    X: ElementSet | None
    cloud: cutproject.PointCloud | None
    rng: np.random.Generator
    budgets: dict
    artifacts: dict

    @property
    def nodes(self) -> int:
        return int(self.budgets.get("nodes", 10**6))

    @property
    def points(self) -> int:
        return int(self.budgets.get("points", cutproject.DEFAULT_POINT_BUDGET))

    def subseed(self) -> int:
        return int(self.rng.integers(0, 2**63))

    def elements(self, encs) -> ElementSet:
        return ElementSet.from_encodings(self.ring, [str(e) for e in encs])

    def need_cloud(self):
        if self.cloud is None:
            raise ConfigError("no point cloud yet: run pisot_window, model_set or algebra_model_set first")
        return self.cloud


@dataclasses.dataclass
class _Op:
    fn: Callable
    params: frozenset
    needs_set: bool


OPERATIONS: dict[str, _Op] = {}


def _op(name: str, params=(), needs_set: bool = True):
    def deco(fn):
        OPERATIONS[name] = _Op(fn, frozenset(params), needs_set)
        return fn

    return deco


def _rat(v) -> Fraction:
    return Fraction(str(v))


@_op("approx_constant", ["mode"])
def _approx_constant(ctx, mode="greedy"):
    return approx.approx_constant(ctx.X, mode=mode, budget_nodes=ctx.nodes)


@_op("commensurability", ["with", "mode"])
def _commensurability(ctx, mode="greedy", **kw):
    a, b = approx.commensurability(ctx.X, ctx.elements(kw["with"]), mode=mode, budget_nodes=ctx.nodes)
    return {"X_by_Y": a, "Y_by_X": b}


@_op("cover_number", ["target", "mode"])
def _cover(ctx, target="approx", mode="greedy"):
    X = ctx.X
    targets = {"sum": lambda: sumset(X, X), "product": lambda: productset(X, X)}
    targets["approx"] = lambda: targets["sum"]() | targets["product"]()
    S = targets[target]() if isinstance(target, str) else ctx.elements(target)
    return cover_number(S, X, mode=mode, budget_nodes=ctx.nodes)


@_op("thickness", ["D", "Y", "mode"])
def _thickness(ctx, D=None, Y=None, mode="exact"):
    Dset = ctx.X if D is None else ctx.elements(D)
    Yset = ElementSet.universe(ctx.ring) if Y is None else ctx.elements(Y)
    res = approx.thickness(Dset, Yset, mode=mode, budget_nodes=ctx.nodes)
    out = res.to_dict()
    if res.exactness == "exact":
        out["bound_holds"] = approx.remark_bound_holds(Dset, Yset, res)
    return out


@_op("bound_suite", ["max_nm"])
def _bounds(ctx, max_nm=4):
    return approx.bound_suite(ctx.X, budget_nodes=ctx.nodes, max_nm=max_nm)


@_op("dichotomy_report", ["mode"])
def _dichotomy(ctx, mode="exact"):
    return approx.dichotomy_report(ctx.X, mode=mode, budget_nodes=ctx.nodes)


@_op("iterate_xn", ["n"])
def _xn(ctx, n=1):
    return {"n": n, "set": iterate_xn(ctx.X, n)}


@_op("word_ball", ["n"])
def _ball(ctx, n=1):
    B = word_ball(ctx.ring, ctx.X, n, ctx.budgets.get("elements"))
    return {"n": n, "size": len(B), "set": B}


@_op("generated_subring")
def _subring(ctx):
    R = structure.generated_subring(ctx.X)
    return {"size": len(R), "set": R}


@_op("nilpotency_class", ["max_class"])
def _class(ctx, max_class=32):
    return {"class": structure.nilpotency_class(structure.generated_subring(ctx.X), max_class)}


@_op("nilpotent_certificate", ["m_max", "class_max"])
def _certificate(ctx, m_max=3, class_max=8):
    cert = structure.nilpotent_certificate(ctx.X, m_max=m_max, class_max=class_max)
    return {"status": "none within bounds"} if cert is None else cert


@_op("escape_norms")
def _norms(ctx):
    table = escape.norm_table(ctx.X, ctx.X.sorted())
    rows = [[ctx.ring.encode(x), str(v.value)] for x, v in table.items()]
    return {"table": {"header": ["element", "norm"], "rows": rows}}


@_op("strong_norm_check", ["sample_budget", "exhaustive_limit"])
def _strong(ctx, sample_budget=200_000, exhaustive_limit=512):
    return escape.strong_norm_check(
        ctx.X, sample_budget=sample_budget, seed=ctx.subseed(), exhaustive_limit=exhaustive_limit
    )


@_op("growth_series", ["n_max"])
def _series(ctx, n_max=10):
    s = growth.growth_series(ctx.ring, ctx.X, n_max, ctx.budgets.get("elements"))
    out = s.to_dict()
    out["table"] = {"header": ["n", "size"], "rows": [[n, v] for n, v in enumerate(s.sizes)]}
    return out


@_op("gromov_report", ["n_max", "class_max", "d", "N", "quotient_modulus"])
def _gromov(ctx, n_max=12, class_max=8, d=None, N=1, quotient_modulus=None):
    return growth.gromov_report(
        ctx.ring, ctx.X, n_max, class_max, None if d is None else _rat(d), N, quotient_modulus,
        ctx.budgets.get("elements", 200_000),
    )


# cloud operations -----------------------------------------------------------


@_op("pisot_window", ["d", "w", "R"], needs_set=False)
def _pisot(ctx, d=2, w=1, R=50):
    ctx.cloud = cutproject.pisot_window(int(d), _rat(w), _rat(R), budget_points=ctx.points)
    return {"points": len(ctx.cloud.points), "provenance": ctx.cloud.provenance}


@_op("model_set", ["spec"], needs_set=False)
def _model_set(ctx, spec=None):
    ctx.cloud = cutproject.model_set(spec, budget_points=ctx.points)
    return {"points": len(ctx.cloud.points), "provenance": ctx.cloud.provenance}


@_op("algebra_model_set", ["d", "w", "R", "basis", "margin", "sample_pairs"], needs_set=False)
def _algebra(ctx, d=2, w=1, R=4, basis=None, margin=None, sample_pairs=500):
    ctx.cloud, rep = cutproject.algebra_model_set(
        int(d), _rat(w), _rat(R), basis, None if margin is None else _rat(margin),
        sample_pairs=sample_pairs, seed=ctx.subseed(), budget_points=ctx.points,
    )
    return {"points": len(ctx.cloud.points), "closure": rep}


@_op("cloud_stats", ["margin"], needs_set=False)
def _stats(ctx, margin=None):
    return cutproject.cloud_stats(ctx.need_cloud(), None if margin is None else _rat(margin))


@_op("approx_check_cloud", ["margin", "mode"], needs_set=False)
def _cloud_approx(ctx, margin=0, mode="greedy"):
    return cutproject.approx_check_cloud(ctx.need_cloud(), _rat(margin), mode=mode, budget_nodes=ctx.nodes)


@_op("window_commensurability", ["d", "w1", "w2", "R", "margin", "mode"], needs_set=False)
def _window_comm(ctx, d=2, w1=1, w2=2, R=50, margin=0, mode="greedy"):
    a, b = cutproject.window_commensurability(
        int(d), _rat(w1), _rat(w2), _rat(R), _rat(margin), mode=mode,
        budget_nodes=ctx.nodes, budget_points=ctx.points,
    )
    return {"w1_by_w2": a, "w2_by_w1": b}


@_op("write_cloud", ["path", "svg"], needs_set=False)
def _write_cloud(ctx, path="cloud.txt", svg=None):
    cloud = ctx.need_cloud()
    ctx.artifacts[path] = cutproject.write_cloud(cloud, None)
    if svg:
        ctx.artifacts[svg] = cutproject.write_cloud_svg(cloud, None)
    return {"written": sorted(p for p in (path, svg) if p)}


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------


def _generate(ring: Ring, gen: dict, rng: np.random.Generator) -> ElementSet:
    recipe = gen["recipe"]
    if recipe == "explicit":
        return ElementSet.from_encodings(ring, [str(e) for e in gen["elements"]])
    if recipe == "random_symmetric":
        return random_symmetric(ring, int(gen["size"]), rng)
    if recipe == "interval":
        return interval(ring, int(gen["lo"]), int(gen["hi"]))
    # ideal generated by the listed elements inside the whole (finite) ring
    seeds = ElementSet.from_encodings(ring, [str(e) for e in gen["generators"]])
    return structure.generated_ideal(ElementSet.universe(ring), seeds)


def run_item(config: ExperimentConfig, index: int) -> dict:
    """Run the pipeline on corpus item ``index``; pure, so safe in worker processes."""
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, index]))
    ring = make_ring(config.ring) if config.ring is not None else None
    X = _generate(ring, config.generator, rng) if config.generator is not None else None
    ctx = _Context(ring, X, None, rng, config.budgets, {})
    item = {"index": index, "steps": [], "status": "ok"}
    if X is not None:
        item["X"] = X.encode()
    for step in config.pipeline:
        params = {k: v for k, v in step.items() if k != "op"}
        entry = {"op": step["op"]}
        try:
            entry["result"] = jsonable(OPERATIONS[step["op"]].fn(ctx, **params))
            entry["status"] = "ok"
        except BudgetExceeded as exc:
            entry["status"] = "truncated"
            entry["error"] = str(exc)
            entry["reached"] = jsonable(exc.reached)
            if item["status"] == "ok":
                item["status"] = "truncated"
        except (ApproxRingError, ValueError, TypeError, KeyError) as exc:
            entry["status"] = "error"
            entry["error"] = f"{type(exc).__name__}: {exc}"
            item["status"] = "error"
        item["steps"].append(entry)
    item["artifacts"] = ctx.artifacts
    return item


def _run_star(args):
    return run_item(*args)


def run_experiment(config: ExperimentConfig, out_dir=None, workers: int | None = None) -> tuple[dict, int]:
    """Run every corpus item, merge in item order, write outputs; return (report, exit status).

    The exit status is 0 when the pipeline completed (truncated or
    inconclusive results included) and 1 when any step hit a structural error.
    """
    workers = config.workers if workers is None else workers
    jobs = [(config, i) for i in range(config.corpus)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            items = list(pool.map(_run_star, jobs))
    else:
        items = [_run_star(j) for j in jobs]
    artifacts = {}
    for it in items:
        for path, text in it.pop("artifacts").items():
            key = path if config.corpus == 1 else _indexed(path, it["index"])
            artifacts[key] = text
    status = 1 if any(it["status"] == "error" for it in items) else 0
    result = {"items": items, "status": "error" if status else "completed"}
    report = envelope("experiment", config.resolved(), result)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for path, text in sorted(artifacts.items()):
            _write(out / path, text)
        _write(out / config.outputs.get("report", "report.json"), to_json(report))
        _write(out / config.outputs.get("summary", "summary.txt"), to_text(report))
    return report, status


def _indexed(path: str, index: int) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}.{index}{ext}"


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
