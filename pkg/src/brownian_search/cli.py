"""Command-line front end.

    brownian-search walk chain --length 10 --trials 100000
    brownian-search cost grover --N 2^80 --t 1year --m0 1e3 --d0 1e5 --g0 3e6
    brownian-search scenario near_future --csv
    brownian-search search vow --bits 20 --workers 16 --seeds 50

Exit codes: 0 ok, 1 bound violation under --strict, 2 usage or config error,
3 a claimed solution failed verification.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import numbers
import sys
from dataclasses import dataclass, field

from . import cost_model as cm
from . import search_lab as sl
from . import walk_engine as we
from .config import BUNDLED, ConfigError, load_config, parse_quantity
from .registry import FORMULAS, UNITS

DEFAULT_SEED = 0
CSV_HEADER = ("formula_id", "name", "value", "units", "inputs")


@dataclass
class ResultRow:
    formula_id: str
    name: str
    value: float
    units: str
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.formula_id not in FORMULAS:
            raise KeyError(f"unregistered formula id {self.formula_id!r}")
        if self.units not in UNITS:
            raise ValueError(f"unknown units {self.units!r}")


def format_value(value, units: str) -> str:
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if units == "bits_log2":
        return f"{value:.2f}"
    if math.isnan(value):
        return "nan"
    return f"{value:.3e}"


def _format_input(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def render_csv(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        inputs = ";".join(f"{k}={_format_input(v)}" for k, v in r.inputs.items())
        writer.writerow((r.formula_id, r.name, format_value(r.value, r.units), r.units, inputs))
    return buf.getvalue()


def render_table(rows: list[ResultRow]) -> str:
    cells = [(r.name, format_value(r.value, r.units), r.units, r.formula_id) for r in rows]
    widths = [max(len(c[i]) for c in cells + [("name", "value", "units", "formula")]) for i in range(4)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(("name", "value", "units", "formula"), widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(cell, widths)) for cell in cells]
    return "\n".join(lines) + "\n"


class UsageError(Exception):
    pass


def _quantity(text: str) -> float:
    try:
        return parse_quantity(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _count(text: str) -> int:
    value = _quantity(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return int(value)


# ----------------------------------------------------------------------------
# walk


def cmd_walk(args) -> tuple[list[ResultRow], int]:
    if args.kind == "chain":
        if args.length is None:
            raise UsageError("walk chain needs --length")
        graph = we.build_chain(args.length)
        inputs = {"kind": "chain", "length": args.length}
    elif args.kind == "tree":
        if args.height is None:
            raise UsageError("walk tree needs --height")
        graph = we.build_tree(args.height)
        inputs = {"kind": "tree", "height": args.height}
    else:
        if args.height is None or args.length is None:
            raise UsageError("walk tree_chain needs --height and --length")
        graph = we.build_tree_chain(args.height, args.length)
        inputs = {"kind": "tree_chain", "height": args.height, "length": args.length}
    params = we.WalkParams(epsilon=args.epsilon, kT=args.kT, tau_max=args.tau_max)
    inputs.update(epsilon=args.epsilon, kT=args.kT, trials=args.trials, seed=args.seed)

    rows = []
    estimates = []
    if graph.num_vertices <= we.MAX_EXACT_VERTICES:
        exact = we.exact_hitting_time(graph, params)
        estimates.append(exact)
        rows.append(ResultRow("walk.exact", "exact", exact, "dimensionless", inputs))
    if args.trials > 0:
        stats = we.estimate_hitting_time(graph, params, args.trials, args.seed)
        estimates.append(stats.mean)
        rows.append(ResultRow("walk.mc_mean", "mc_mean", stats.mean, "dimensionless", inputs))
        rows.append(ResultRow("walk.mc_ci95", "mc_ci95", stats.ci95_half_width, "dimensionless", inputs))
        rows.append(ResultRow("walk.censored", "censored_fraction", stats.censored_fraction,
                              "dimensionless", inputs))
    status = 0
    if args.epsilon == 0:
        bound = graph.hitting_bound()
        ok = all(e <= bound for e in estimates)
        rows.append(ResultRow("walk.bound", "bound", bound, "dimensionless", inputs))
        rows.append(ResultRow("walk.bound_ok", "bound_ok", int(ok), "dimensionless", inputs))
        if not ok and args.strict:
            status = 1
    return rows, status


# ----------------------------------------------------------------------------
# cost

COST_ALGORITHMS = ("collision", "claw-q", "claw-c", "grover", "preimage-powered",
                   "preimage-unpowered", "fixed-pt-classical", "fixed-pt-quantum")


def _estimate_rows(est: cm.CostEstimate, inputs: dict) -> list[ResultRow]:
    rows = [ResultRow(est.formula_id, "energy", est.energy, "J", inputs)]
    if est.per_gate_energy is not None:
        per_gate_id = est.formula_id.replace("energy", "per_gate")
        rows.append(ResultRow(per_gate_id, "per_gate_energy", est.per_gate_energy, "J", inputs))
    if est.temperature is not None:
        rows.append(ResultRow("preimage.unpowered.kT.full", "kT", est.kT, "J", inputs))
        rows.append(ResultRow("preimage.unpowered.kT.full", "temperature", est.temperature, "K", inputs))
    if "latching_energy" in est.details:
        rows.append(ResultRow("preimage.unpowered.latching", "latching_energy",
                              est.details["latching_energy"], "J", inputs))
        rows.append(ResultRow("preimage.unpowered.latching", "latching_negligible",
                              int(est.details["latching_negligible"]), "dimensionless", inputs))
    return rows


def cmd_cost(args) -> tuple[list[ResultRow], int]:
    oracle = cm.OracleCost(args.m0, args.d0, args.g0)
    base = {"m0": args.m0, "d0": args.d0, "g0": args.g0}
    alg = args.algorithm
    if alg.startswith("claw"):
        if args.N1 is None or args.N2 is None:
            raise UsageError(f"cost {alg} needs --N1 and --N2")
        inputs = {"N1": args.N1, "N2": args.N2, "M": args.M, "t": args.t}
        if alg == "claw-q":
            return [ResultRow("claw.energy.quantum", "energy",
                              cm.claw_energy_quantum(args.N1, args.N2, args.M, args.t), "J", inputs)], 0
        return [ResultRow("claw.energy.classical", "energy",
                          cm.claw_energy_classical(args.N1, args.N2, args.M, args.t), "J", inputs)], 0
    if args.N is None:
        raise UsageError(f"cost {alg} needs --N")
    if alg.startswith("fixed-pt"):
        if args.P is None:
            raise UsageError(f"cost {alg} needs --P")
        inputs = {"N": args.N, "P": args.P, "T": args.T, **base}
        kind = "classical" if alg == "fixed-pt-classical" else "quantum"
        fn = cm.fixed_pt_classical if kind == "classical" else cm.fixed_pt_quantum
        t, M = fn(args.N, args.P, args.T, oracle)
        return [ResultRow(f"fixed_pt.{kind}.time", "time", t, "s", inputs),
                ResultRow(f"fixed_pt.{kind}.memory", "memory", M, "bits", inputs)], 0
    inputs = {"N": args.N, "M": args.M, "t": args.t, **base}
    if alg == "collision":
        est = cm.collision_energy(args.N, args.M, args.t, oracle, p=args.p)
    elif alg == "grover":
        est = cm.grover_cost(args.N, args.M, args.t, oracle)
    elif alg == "preimage-powered":
        est = cm.powered_preimage_cost(args.N, args.M, args.t, oracle)
    else:
        est = cm.unpowered_preimage_cost(args.N, args.M, args.t, oracle)
    return _estimate_rows(est, inputs), 0


# ----------------------------------------------------------------------------
# scenario


def scenario_rows(cfg, T_quant_mem: float = cm.DEFAULT_T_QUANT_MEM_K) -> list[ResultRow]:
    E = cfg.energy_budget_J if cfg.energy_budget_J is not None else 1.0
    report = cm.scenario_eval(cfg.tech, cfg.oracle, cfg.t_seconds, E, T_quant_mem)
    inputs = {"scenario": cfg.name, "E": E}
    return [ResultRow(fid, name, value, units, inputs) for fid, name, value, units in report.rows()]


def cmd_scenario(args) -> tuple[list[ResultRow], int]:
    return scenario_rows(load_config(args.config), args.t_quant_mem), 0


# ----------------------------------------------------------------------------
# search


def _mean_rows(fid: str, per_seed: list[dict], inputs: dict) -> list[ResultRow]:
    rows = []
    for name in per_seed[0]:
        values = [d[name] for d in per_seed]
        rows.append(ResultRow(fid, f"mean_{name}", sum(values) / len(values), "dimensionless", inputs))
    return rows


def cmd_search(args) -> tuple[list[ResultRow], int]:
    alg = args.algorithm
    n = args.bits
    N = 1 << n
    fid = f"search.{alg}"
    if alg == "grover":
        k = args.marked
        j = args.iterations if args.iterations is not None else sl.grover_iterations(N, k)
        p = sl.grover_simulate(n, range(k), j)
        inputs = {"bits": n, "marked": k}
        return [ResultRow(fid, "iterations", j, "dimensionless", inputs),
                ResultRow(fid, "success_probability", p, "dimensionless", inputs),
                ResultRow(fid, "closed_form", sl.grover_closed_form(N, k, j), "dimensionless", inputs)], 0

    rows: list[ResultRow] = []
    summaries: list[dict] = []
    for s in range(args.seeds):
        seed = args.seed + s
        f = sl.ToyFunction(n, seed=seed, kind=args.function)
        inputs = {"bits": n, "seed": seed, "function": args.function}
        if alg == "vow":
            st = sl.vow_collision(f, args.workers, args.dp_bits, seed=seed)
            inputs["workers"] = args.workers
            summary = {"serial_depth": st.serial_depth, "oracle_queries": st.oracle_queries,
                       "normalized_depth": st.serial_depth * args.workers / math.sqrt(N)}
        elif alg == "exhaustive":
            target = args.target if args.target is not None else f(N - 1)
            st = sl.exhaustive_preimage(f, target, args.workers)
            inputs.update(workers=args.workers, target=target)
            summary = {"serial_depth": st.serial_depth, "oracle_queries": st.oracle_queries}
        elif alg == "brownian":
            target = args.target if args.target is not None else f(0)
            st = sl.brownian_preimage(f, target, args.chain, args.trials, seed)
            inputs.update(target=target, chain=args.chain, trials=args.trials)
            hit = st.details["hitting"]
            summary = {"mean_steps": hit.mean, "ci95": hit.ci95_half_width, "bound": st.details["bound"]}
        else:
            M = args.workers
            st = sl.bht_toy_run(f, M, seed)
            inputs["workers"] = M
            summary = {"oracle_queries": st.oracle_queries,
                       "success_probability": st.details["success_probability"]}
        if st.found:
            if isinstance(st.result, tuple):
                sl.verify_collision(f, *st.result)
                summary["result_a"], summary["result_b"] = st.result
            else:
                sl.verify_preimage(f, st.result, target)
                summary["result"] = st.result
        summary["found"] = int(st.found)
        for name, value in summary.items():
            rows.append(ResultRow(fid, name, value, "dimensionless", inputs))
        summaries.append({k: v for k, v in summary.items() if not k.startswith("result")})
    aggregate = {"bits": n, "seeds": args.seeds, "function": args.function}
    if alg in ("vow", "exhaustive", "bht"):
        aggregate["workers"] = args.workers
    rows += _mean_rows(fid, summaries, aggregate)
    return rows, 0


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--csv", action="store_true", help="emit CSV instead of a table")
    common.add_argument("--seed", type=_count, default=DEFAULT_SEED, help="base seed (default 0)")
    common.add_argument("--strict", action="store_true", help="nonzero exit on bound violations")
    common.add_argument("--out", help="write output to this path")

    parser = argparse.ArgumentParser(prog="brownian-search", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", parents=[common], help="exact and Monte Carlo hitting times")
    p.add_argument("kind", choices=("chain", "tree", "tree_chain"))
    p.add_argument("--length", type=_count)
    p.add_argument("--height", type=_count)
    p.add_argument("--epsilon", type=_quantity, default=0.0, help="drive energy per gate (J)")
    p.add_argument("--kT", type=_quantity, default=1.0, help="thermal energy (J)")
    p.add_argument("--trials", type=_count, default=10_000)
    p.add_argument("--tau-max", type=_count, default=None)
    p.set_defaults(handler=cmd_walk)

    p = sub.add_parser("cost", parents=[common], help="closed-form resource costs")
    p.add_argument("algorithm", choices=COST_ALGORITHMS)
    for name in ("N", "N1", "N2", "P", "p"):
        p.add_argument(f"--{name}", type=_quantity)
    p.add_argument("--M", type=_quantity, default=1.0)
    p.add_argument("--t", type=_quantity, default=1.0, help="time budget (s, or e.g. 1year)")
    p.add_argument("--T", type=_quantity, default=300.0, help="temperature (K)")
    p.add_argument("--m0", type=_quantity, default=1.0)
    p.add_argument("--d0", type=_quantity, default=1.0)
    p.add_argument("--g0", type=_quantity, default=1.0)
    p.set_defaults(handler=cmd_cost)

    p = sub.add_parser("scenario", parents=[common], help="technology scenario report")
    p.add_argument("config", help=f"config path or bundled name ({', '.join(BUNDLED)})")
    p.add_argument("--t-quant-mem", type=_quantity, default=cm.DEFAULT_T_QUANT_MEM_K,
                   help="quantum temperature (K) for the memory check")
    p.set_defaults(handler=cmd_scenario)

    p = sub.add_parser("search", parents=[common], help="desk-scale search runs")
    p.add_argument("algorithm", choices=("vow", "exhaustive", "brownian", "grover", "bht"))
    p.add_argument("--bits", type=_count, required=True)
    p.add_argument("--workers", type=_count, default=1)
    p.add_argument("--seeds", type=_count, default=1)
    p.add_argument("--function", choices=("random_function", "identity", "constant"),
                   default="random_function")
    p.add_argument("--target", type=_count)
    p.add_argument("--marked", type=_count, default=1)
    p.add_argument("--iterations", type=_count)
    p.add_argument("--chain", type=_count, default=4)
    p.add_argument("--trials", type=_count, default=10_000)
    p.add_argument("--dp-bits", type=_count)
    p.set_defaults(handler=cmd_search)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, status = args.handler(args)
    except sl.VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    text = render_csv(rows) if args.csv else render_table(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
