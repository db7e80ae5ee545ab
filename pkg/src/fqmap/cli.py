"""Command-line front end and batch experiment runner.

Graphs are given either as a JSON file path or as a generator spec
``kind[:key=value,...]``, for example ``grid:rows=6,cols=6`` or
``random-regular:degree=3,n=64,seed=1``. Orders are ``order[v] = position``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from . import ancilla, cost, encodings, graphs, pauli, qap

REPORT_COLUMNS = ("graph", "n", "encoding", "model", "objective", "ancillas", "value", "seed", "elapsed_ms", "proven_optimal")
SWEEP_COLUMNS = ("p", "total_hopping_weight")
OBJECTIVES = ("total", "max")
EXACT_AUTO_LIMIT = 8


class ConfigError(ValueError):
    pass


# graph and order inputs ----------------------------------------------------


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_graph_spec(spec: str) -> graphs.HamiltonianGraph:
    """Load a graph file or build one from ``kind[:key=value,...]``."""
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        return graphs.read_graph(path)
    kind, _, rest = spec.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"bad generator parameter {item!r}; expected key=value")
        params[key.strip().replace("-", "_")] = _parse_value(value.strip())
    return named_graph(kind, params)


def named_graph(kind: str, params: dict) -> graphs.HamiltonianGraph:
    if kind in graphs.FAMILY_64:
        g = graphs.FAMILY_64[kind](**params)
    else:
        try:
            g = graphs.generate(kind, **params)
        except TypeError as exc:
            raise ConfigError(f"bad parameters for generator {kind!r}: {exc}") from None
    return replace(g, name=g.name or kind)


def load_order(path: str | None, n: int) -> tuple[int, ...] | None:
    if path is None:
        return None
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("order")
    if not isinstance(data, list):
        raise ConfigError(f"{path}: expected a JSON list or an object with an 'order' list")
    return graphs.check_order(data, n)


def load_plan(path: str | None, n: int) -> ancilla.AncillaPlan | None:
    if path is None:
        return None
    data = json.loads(Path(path).read_text())
    plan = ancilla.AncillaPlan.from_dict(data)
    if plan.n != n:
        raise ConfigError(f"{path}: plan is for {plan.n} qubits, graph has {n} vertices")
    return plan


def _dump_json(data, out: str | None) -> None:
    text = json.dumps(data) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# solving -------------------------------------------------------------------


def solve_order(cc: cost.CostComponents, graph: graphs.HamiltonianGraph, params: qap.SearchParams, exact: str = "auto") -> qap.OrderResult:
    """Brute force for small graphs (``exact`` = auto/always/never), annealing otherwise."""
    if exact == "always" or (exact == "auto" and graph.n <= EXACT_AUTO_LIMIT):
        return qap.brute_force(cc, graph)
    return qap.optimize_order(cc, graph, params)


def hopping_weight_after(graph: graphs.HamiltonianGraph, order, plan: ancilla.AncillaPlan) -> int:
    """Total hopping weight of the explicitly constructed Hamiltonian."""
    enc = encodings.build_encoding("jw", graph.n)
    ham = pauli.assemble_hamiltonian(graph, enc, order)
    if plan.p:
        modified = ancilla.apply_plan(ham, plan)
        if not ancilla.verify_equivalence(ham, modified):
            raise AssertionError("modified Hamiltonian is not equivalent to the original")
        ham = modified
    return ham.total_weight(["hop"])


# batch runs ----------------------------------------------------------------


@dataclass
class ExperimentConfig:
    graphs: list[dict]
    encodings: list[str] = field(default_factory=lambda: ["jw"])
    models: list[str] = field(default_factory=lambda: ["full"])
    objectives: list[str] = field(default_factory=lambda: ["total"])
    ancillas: list[int] = field(default_factory=lambda: [0])
    seed: int = 0
    restarts: int = 4
    time_limit: float | None = None
    iterations: int | None = None
    exact: str = "auto"
    workers: int = 1
    csv: str | None = None
    artifacts: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        search = data.pop("search", {}) or {}
        output = data.pop("output", {}) or {}
        known = set(cls.__dataclass_fields__)
        extra = (set(data) | set(search) | set(output)) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        cfg = cls(**data, **search, **output)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not self.graphs:
            raise ConfigError("config lists no graphs")
        for g in self.graphs:
            if not isinstance(g, dict) or not ("file" in g or "generator" in g):
                raise ConfigError(f"graph entry needs 'file' or 'generator': {g!r}")
        for e in self.encodings:
            encodings.EncodingKind.parse(e)
        for m in self.models:
            if m not in graphs.MODEL_PRESETS:
                raise ConfigError(f"unknown model {m!r}; expected one of {graphs.MODEL_PRESETS}")
        for o in self.objectives:
            if o not in OBJECTIVES:
                raise ConfigError(f"unknown objective {o!r}; expected one of {OBJECTIVES}")
        if any(p < 0 for p in self.ancillas):
            raise ConfigError("ancilla budgets must be non-negative")
        if any(p > 0 for p in self.ancillas):
            jw_only = all(encodings.EncodingKind.parse(e) is encodings.EncodingKind.JORDAN_WIGNER for e in self.encodings)
            if not (jw_only and self.models == ["hopping"] and self.objectives == ["total"]):
                raise ConfigError("ancilla budgets need encodings ['jw'], models ['hopping'] and objectives ['total']")
        if self.exact not in ("auto", "always", "never"):
            raise ConfigError(f"exact must be auto, always or never, got {self.exact!r}")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")


def _graph_of(entry: dict) -> graphs.HamiltonianGraph:
    if "file" in entry:
        g = graphs.read_graph(entry["file"])
    else:
        g = named_graph(entry["generator"], entry.get("params", {}))
    return replace(g, name=entry.get("name", g.name))


def _run_job(job) -> list[dict]:
    cfg, entry, enc_name, model, objective_name = job
    base = _graph_of(entry)
    g = graphs.apply_model(base, model)
    enc = encodings.build_encoding(enc_name, g.n)
    cc = cost.cost_components(enc, objective_name)
    params = qap.SearchParams(seed=cfg.seed, restarts=cfg.restarts, time_limit=cfg.time_limit, iterations=cfg.iterations)
    t0 = time.perf_counter()
    res = solve_order(cc, g, params, cfg.exact)
    order_ms = (time.perf_counter() - t0) * 1000
    check = cost.objective(cc, g, res.order)
    if check != res.value:
        raise AssertionError(f"reported value {res.value} fails re-validation ({check})")
    row = dict(graph=base.name, n=g.n, encoding=enc.kind.value, model=model, objective=objective_name, seed=cfg.seed)
    rows = []
    budgets = sorted(set(cfg.ancillas))
    plans = {}
    if budgets[-1] > 0:
        t1 = time.perf_counter()
        sweep = ancilla.sweep_plans(g, res.order, budgets[-1], ancilla.PlanSearchParams(seed=cfg.seed))
        plan_ms = (time.perf_counter() - t1) * 1000
        plans = {p: sweep[p] for p in budgets}
    for p in budgets:
        if p == 0:
            rows.append(dict(row, ancillas=0, value=res.value, elapsed_ms=round(order_ms), proven_optimal=res.proven_optimal, partial=res.partial, order=res.order))
            continue
        plan, delta = plans[p]
        value = res.value + delta
        rebuilt = hopping_weight_after(g, res.order, plan)
        if rebuilt != value:
            raise AssertionError(f"predicted hopping weight {value} fails re-validation ({rebuilt})")
        rows.append(dict(row, ancillas=p, value=value, elapsed_ms=round(order_ms + plan_ms), proven_optimal=False, partial=res.partial, order=res.order, plan=plan.to_dict()))
    return rows


def _jobs(cfg: ExperimentConfig):
    for entry in cfg.graphs:
        for enc in cfg.encodings:
            for model in cfg.models:
                for obj in cfg.objectives:
                    yield (cfg, entry, enc, model, obj)


def run(cfg: ExperimentConfig, out=None) -> list[dict]:
    """Run every (graph, encoding, model, objective) job and write report rows.

    Rows are emitted in job order whatever the worker count.
    """
    jobs = list(_jobs(cfg))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_job, jobs))
    else:
        results = [_run_job(j) for j in jobs]
    rows = [r for rs in results for r in rs]
    text = report_csv(rows)
    if cfg.csv:
        Path(cfg.csv).write_text(text)
    if out is not None:
        out.write(text)
    if cfg.artifacts:
        adir = Path(cfg.artifacts)
        adir.mkdir(parents=True, exist_ok=True)
        for r in rows:
            stem = f"{r['graph']}_{r['encoding']}_{r['model']}_{r['objective']}_p{r['ancillas']}"
            art = {"order": list(r["order"]), "value": r["value"]}
            if "plan" in r:
                art["plan"] = r["plan"]
            (adir / f"{stem}.json").write_text(json.dumps(art, indent=2) + "\n")
    for r in rows:
        if r["partial"]:
            print(f"warning: {r['graph']}/{r['encoding']}/{r['model']} hit the time limit; result is partial", file=sys.stderr)
    return rows


def report_csv(rows: Sequence[dict], header: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(REPORT_COLUMNS)
    for r in rows:
        w.writerow([_csv_cell(r[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, bool):
        return str(v).lower()
    return v


def append_report_row(path: str, row: dict) -> None:
    p = Path(path)
    new = not p.exists() or p.stat().st_size == 0
    with p.open("a") as fh:
        fh.write(report_csv([row], header=new))


# subcommands ---------------------------------------------------------------


def cmd_gen_graph(args) -> int:
    g = parse_graph_spec(args.spec)
    if args.model:
        g = graphs.apply_model(g, args.model)
    if args.output:
        graphs.write_graph(g, args.output)
    else:
        _dump_json(graphs.graph_to_dict(g), None)
    return 0


def cmd_encode(args) -> int:
    enc = encodings.build_encoding(args.encoding, args.n)
    _dump_json(enc.to_dict(), args.output)
    return 0


def cmd_cost_matrix(args) -> int:
    enc = encodings.build_encoding(args.encoding, args.n)
    cc = cost.cost_components(enc, args.objective)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    idx = list(range(cc.n))
    for name, mat in cc.as_dict().items():
        with (outdir / f"{name}.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([""] + idx)
            if mat.ndim == 1:
                w.writerow([name] + [int(x) for x in mat])
            else:
                for i in idx:
                    w.writerow([i] + [int(x) for x in mat[i]])
    return 0


def _model_graph(args) -> graphs.HamiltonianGraph:
    g = parse_graph_spec(args.graph)
    return graphs.apply_model(g, args.model) if args.model else g


def cmd_optimize_order(args) -> int:
    g = _model_graph(args)
    enc = encodings.build_encoding(args.encoding, g.n)
    cc = cost.cost_components(enc, args.objective)
    params = qap.SearchParams(seed=args.seed, restarts=args.restarts, time_limit=args.time_limit, workers=args.workers)
    t0 = time.perf_counter()
    res = solve_order(cc, g, params, args.exact)
    elapsed_ms = round((time.perf_counter() - t0) * 1000)
    if cost.objective(cc, g, res.order) != res.value:
        raise AssertionError("reported value fails re-validation")
    out = {"order": list(res.order), "value": res.value, "proven_optimal": res.proven_optimal, "elapsed_ms": elapsed_ms}
    if res.partial:
        out["partial"] = True
        print("warning: time limit reached; result is partial", file=sys.stderr)
    _dump_json(out, args.output)
    if args.report:
        row = dict(graph=g.name or args.graph, n=g.n, encoding=enc.kind.value, model=args.model or "as-given", objective=args.objective,
                   ancillas=0, value=res.value, seed=args.seed, elapsed_ms=elapsed_ms, proven_optimal=res.proven_optimal)
        append_report_row(args.report, row)
    return 0


def cmd_optimize_ancilla(args) -> int:
    g = _model_graph(args)
    order = load_order(args.order, g.n)
    if order is None:
        cc = cost.cost_components(encodings.build_encoding("jw", g.n), "sum")
        order = solve_order(cc, g, qap.SearchParams(seed=args.seed, restarts=args.restarts), args.exact).order
    base = cost.jw_hopping_closed_form(g, order)
    params = ancilla.PlanSearchParams(seed=args.seed)
    sweep = ancilla.sweep_plans(g, order, args.ancillas, params)
    plan, delta = sweep[-1]
    value = base + delta
    if hopping_weight_after(g, order, plan) != value:
        raise AssertionError("predicted hopping weight fails re-validation")
    if args.plan_output:
        _dump_json(plan.to_dict(), args.plan_output)
    if args.sweep:
        with open(args.sweep, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SWEEP_COLUMNS)
            for p, (_, dv) in enumerate(sweep):
                w.writerow([p, base + dv])
    _dump_json({"order": list(order), "plan": plan.to_dict(), "base_hopping_weight": base, "hopping_weight": value}, args.output)
    return 0


def cmd_export_hamiltonian(args) -> int:
    g = _model_graph(args)
    order = load_order(args.order, g.n)
    enc = encodings.build_encoding(args.encoding, g.n)
    ham = pauli.assemble_hamiltonian(g, enc, order)
    plan = load_plan(args.plan, g.n)
    if plan is not None:
        ham = ancilla.apply_plan(ham, plan)
    text = "".join(pauli.format_term(t) + "\n" for t in ham)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_report(args) -> int:
    data = json.loads(Path(args.config).read_text())
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    overrides = {k: getattr(args, k) for k in ("seed", "restarts", "time_limit", "workers", "csv", "artifacts") if getattr(args, k) is not None}
    cfg = ExperimentConfig.from_dict(data)
    cfg = replace(cfg, **overrides)
    cfg.validate()
    run(cfg, out=None if cfg.csv else sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fqmap", description="Fermion-to-qubit mapping cost optimization.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a Hamiltonian graph as JSON")
    p.add_argument("spec", help="kind[:key=value,...], e.g. grid:rows=4,cols=4")
    p.add_argument("--model", choices=graphs.MODEL_PRESETS)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("encode", help="dump an encoding's U, F, P, R matrices")
    p.add_argument("--encoding", required=True, choices=["jw", "bk", "pb", "tt"])
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("cost-matrix", help="write Num/ReHop/ImHop/Inter as CSV files")
    p.add_argument("--encoding", required=True, choices=["jw", "bk", "pb", "tt"])
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--objective", choices=OBJECTIVES, default="total")
    p.add_argument("--output-dir", default=".")
    p.set_defaults(func=cmd_cost_matrix)

    def graph_args(p, model_default=None):
        p.add_argument("graph", help="graph JSON file or kind[:key=value,...]")
        p.add_argument("--model", choices=graphs.MODEL_PRESETS, default=model_default)

    def search_args(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--restarts", type=int, default=4)
        p.add_argument("--exact", choices=["auto", "always", "never"], default="auto")

    p = sub.add_parser("optimize-order", help="optimize the fermionic order")
    graph_args(p, "full")
    p.add_argument("--encoding", choices=["jw", "bk", "pb", "tt"], default="jw")
    p.add_argument("--objective", choices=OBJECTIVES, default="total")
    search_args(p)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--report", help="CSV file to append a report row to")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_optimize_order)

    p = sub.add_parser("optimize-ancilla", help="choose ancilla subsets for a Jordan-Wigner order")
    graph_args(p, "hopping")
    p.add_argument("--ancillas", type=int, required=True)
    p.add_argument("--order", help="order JSON; optimized for total weight when omitted")
    search_args(p)
    p.add_argument("--sweep", help="CSV file for (p, total_hopping_weight), p = 0..ancillas")
    p.add_argument("--plan-output")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_optimize_ancilla)

    p = sub.add_parser("export-hamiltonian", help="write the encoded Hamiltonian, one term per line")
    graph_args(p, None)
    p.add_argument("--encoding", choices=["jw", "bk", "pb", "tt"], default="jw")
    p.add_argument("--order")
    p.add_argument("--plan")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export_hamiltonian)

    p = sub.add_parser("report", help="run a batch experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--csv")
    p.add_argument("--artifacts")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
