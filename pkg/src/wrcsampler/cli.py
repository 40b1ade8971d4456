"""Command-line surface: graph generation, sampling runs, verification
suites, mixing times, canonical-path congestion and benchmarks.

Every command emits JSON lines (one record per result, schema-versioned) and
exits 0 iff all selected checks passed, 1 on a failed check, 2 on bad input.
With a fixed seed all non-timing output is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, exact
from .analysis import (DEFAULT_STATE_CAP, empirical_mixing_time,
                       verify_gap_inequalities, verify_perturbation_bounds)
from .backend import active_backend
from .bench import bench_cftp, bench_chains
from .cftp import check_monotone, perfect_ising_sample_detailed
from .dynamics import ChainKind, run_chain
from .exact import DEFAULT_CAP
from .graphs import (complete_graph, cycle_graph, erdos_renyi, grid_graph, k2,
                     path_graph, random_instance)
from .model import (GraphFormatError, bits_to_hex, params_from_ising,
                    read_graph, write_graph)
from .paths import congestion
from .rng import RngStream

SCHEMA = "wrcsampler/1"

_METHOD_KINDS = {
    "ef-wrc": ChainKind.EF_WRC,
    "ef-sg": ChainKind.EF_SG,
    "sw": ChainKind.SW_ISING,
    "sw-ising": ChainKind.SW_ISING,
    "sw-wrc": ChainKind.SW_WRC,
    "sb": ChainKind.SINGLE_BOND,
}


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _emit(record: dict, out=None) -> None:
    (out or sys.stdout).write(
        json.dumps(record, sort_keys=True, default=_json_default) + "\n")


def _record(command: str, **fields) -> dict:
    rec = {"schema": SCHEMA, "command": command}
    rec.update(fields)
    return rec


class CliError(Exception):
    """Bad input surfaced as exit code 2."""


def _load_graph(args):
    try:
        return read_graph(args.graph)
    except (OSError, GraphFormatError) as exc:
        raise CliError(f"cannot load graph {args.graph!r}: {exc}") from exc


def _instances(args, **gen_kwargs):
    """Either the --graph instance or --random generated ones."""
    if args.graph:
        return [("file:" + args.graph, _load_graph(args))]
    gen = np.random.default_rng(args.seed)
    gen_kwargs.setdefault("n_max", args.n)
    if getattr(args, "m", None):
        gen_kwargs.setdefault("m_max", args.m)
    return [(f"random:{i}", random_instance(gen, **gen_kwargs))
            for i in range(args.random)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "k2":
        g = k2(args.beta, args.lam)
    elif kind == "path":
        g = path_graph(args.n, args.beta, args.lam)
    elif kind == "cycle":
        g = cycle_graph(args.n, args.beta, args.lam)
    elif kind == "complete":
        g = complete_graph(args.n, args.beta, args.lam)
    elif kind == "grid":
        g = grid_graph(args.rows, args.cols, args.beta, args.lam)
    elif kind == "er":
        g = erdos_renyi(args.n, args.prob, args.seed, args.beta, args.lam)
    else:  # pragma: no cover - argparse constrains choices
        raise CliError(f"unknown generator {kind}")
    write_graph(g, args.out)
    _emit(_record("gen", kind=kind, n=g.n, m=g.m, out=args.out))
    return 0


def cmd_sample(args) -> int:
    g = _load_graph(args)
    w, s = params_from_ising(g)
    if args.method == "cftp":
        for i in range(args.count):
            seed = args.seed + i
            t0 = time.perf_counter()
            spins, info = perfect_ising_sample_detailed(g, seed, args.max_doubling)
            _emit(_record("sample", method="cftp", seed=seed,
                          spins=bits_to_hex(spins), subset=bits_to_hex(info.subset),
                          tstar=info.tstar, draws=info.draws,
                          wall_time=time.perf_counter() - t0))
        return 0

    kind = _METHOD_KINDS[args.method]
    params = s if kind == ChainKind.EF_SG else w
    width = g.n if kind == ChainKind.SW_ISING else g.m
    state = np.zeros(width, dtype=np.uint8)
    if args.start == "full":
        state[:] = 1
    rng = RngStream(args.seed)
    t0 = time.perf_counter()
    stride = args.stride if args.trace else 0
    state, trace = run_chain(g, params, kind, state, args.steps, rng, stride)
    wall = time.perf_counter() - t0
    if args.trace:
        _write_trace(args.trace, trace, stride)
    _emit(_record("sample", method=args.method, seed=args.seed,
                  steps=args.steps, state=bits_to_hex(state),
                  draws=rng.counter, trace=args.trace or None, wall_time=wall))
    return 0


def _write_trace(path: str, trace: np.ndarray, stride: int) -> None:
    if path.endswith(".npy"):
        np.save(path, trace)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("step,state\n")
        for i in range(trace.shape[0]):
            fh.write(f"{(i + 1) * stride},{bits_to_hex(trace[i])}\n")


def _verify_equivalence(args):
    for label, g in _instances(args):
        rec = exact.verify_equivalence(g, cap=args.enum_cap)
        rec["instance"] = label
        yield rec


def _verify_coupling(args):
    for label, g in _instances(args):
        _, s = params_from_ising(g)
        rec = exact.verify_coupling(g, s, cap=args.enum_cap)
        rec["instance"] = label
        yield rec


def _verify_holant(args):
    gen = np.random.default_rng(args.seed + 1)
    for label, g in _instances(args, m_max=min(getattr(args, "m", 4) or 4, 5)):
        w, s = params_from_ising(g)
        fs, gs = exact.ising_signatures(g)
        z_ising = exact.enumerate_ising(g, cap=args.enum_cap).logz
        h = exact.holant(g, fs, gs, cap=args.enum_cap)
        residual = abs(np.log(h) - z_ising)
        yield {"check": "holant-matches-spin-enumeration", "instance": label,
               "lhs": h, "rhs": z_ising, "residual": residual,
               "pass": bool(residual <= 1e-10)}
        rec = exact.verify_hol_transform(g, fs, gs, exact.HolTransform.hadamard(),
                                         cap=args.enum_cap)
        rec["instance"] = label
        rec["transform"] = "hadamard"
        yield rec
        for k in range(args.transforms):
            while True:
                mat = gen.uniform(-2.0, 2.0, size=(2, 2))
                if abs(np.linalg.det(mat)) >= 0.3:
                    break
            rec = exact.verify_hol_transform(g, fs, gs, exact.HolTransform(mat),
                                             cap=args.enum_cap)
            rec["instance"] = label
            rec["transform"] = f"random:{k}"
            yield rec
        rec = exact.verify_counting_identity(g, cap=args.enum_cap)
        rec["instance"] = label
        yield rec


def _verify_gaps(args):
    for label, g in _instances(args, n_max=min(args.n, 4)):
        rec = verify_gap_inequalities(g, cap=args.state_cap)
        rec["instance"] = label
        yield rec


def _verify_perturb(args):
    for label, g in _instances(args, n_max=min(args.n, 4)):
        rec = verify_perturbation_bounds(g, cap=args.state_cap)
        rec["instance"] = label
        yield rec


def _verify_monotone(args):
    instances = _instances(args, n_max=min(args.n, 8), m_max=12)
    per = max(args.trials // max(len(instances), 1), 1)
    for label, g in instances:
        w, _ = params_from_ising(g)
        bad = check_monotone(g, w, per, args.seed)
        yield {"check": "monotone-coupling", "instance": label,
               "lhs": bad, "rhs": 0, "residual": float(bad),
               "trials": per, "pass": bad == 0}


def _verify_paths(args):
    # load bounds need eta_min > 0, so keep every field strictly below 1
    for label, g in _instances(args, m_max=min(getattr(args, "m", 6) or 6, 7),
                               unit_field_share=0.0, lam_low=0.2):
        _, s = params_from_ising(g)
        rep = congestion(g, s)
        yield {"check": "canonical-path-congestion", "instance": label,
               "rho": rep.rho, "max_load_transition": list(rep.max_load_transition),
               "gap": rep.gap, "bound_ok": rep.bound_ok,
               "flow_residual": rep.flow_residual,
               "max_length": rep.max_length,
               "lhs": rep.rho, "rhs": 1.0 / rep.gap,
               "residual": max(0.0, 1.0 / rep.gap - rep.rho),
               "pass": bool(rep.bound_ok and rep.load_bound_ok
                            and rep.flow_residual <= 1e-12)}


_SUITES = {
    "equivalence": _verify_equivalence,
    "coupling": _verify_coupling,
    "holant": _verify_holant,
    "gaps": _verify_gaps,
    "perturb": _verify_perturb,
    "monotone": _verify_monotone,
    "paths": _verify_paths,
}


def cmd_verify(args) -> int:
    ok = True
    count = 0
    for rec in _SUITES[args.suite](args):
        rec = dict(rec)
        rec.setdefault("schema", SCHEMA)
        rec.setdefault("command", "verify")
        _emit(rec)
        ok &= bool(rec["pass"])
        count += 1
    _emit(_record("verify", suite=args.suite, checks=count, **{"pass": ok}))
    return 0 if ok else 1


def cmd_mixing(args) -> int:
    g = _load_graph(args)
    w, s = params_from_ising(g)
    kind = _METHOD_KINDS[args.chain]
    params = s if kind == ChainKind.EF_SG else w
    rec = empirical_mixing_time(kind, g, params, args.epsilon, cap=args.state_cap)
    rec.update(schema=SCHEMA, command="mixing")
    _emit(rec)
    return 0 if rec["pass"] else 1


def cmd_paths(args) -> int:
    if args.action != "congestion":  # pragma: no cover - argparse constrains choices
        raise CliError(f"unknown paths action {args.action!r}")
    g = _load_graph(args)
    _, s = params_from_ising(g)
    rep = congestion(g, s, max_edges=args.max_edges)
    rec = _record("paths", action="congestion", rho=rep.rho,
                  max_load_transition=list(rep.max_load_transition),
                  gap=rep.gap, bound_ok=rep.bound_ok,
                  flow_residual=rep.flow_residual)
    rec["pass"] = bool(rep.bound_ok and rep.load_bound_ok)
    _emit(rec)
    return 0 if rec["pass"] else 1


def cmd_bench(args) -> int:
    g = _load_graph(args) if args.graph else grid_graph(args.rows, args.cols)
    for rec in bench_chains(g, args.steps, args.seed):
        rec.update(schema=SCHEMA, command="bench")
        _emit(rec)
    cftp_g = _load_graph(args) if args.graph else k2()
    for rec in bench_cftp(cftp_g, args.seeds, args.seed):
        rec.update(schema=SCHEMA, command="bench")
        _emit(rec)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wrcsampler",
        description="Ising / weighted random cluster samplers and verification suites")
    ap.add_argument("--version", action="version",
                    version=f"wrcsampler {__version__} (backend {active_backend()})")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("gen", help="write a generated graph file")
    p.add_argument("kind", choices=["k2", "path", "cycle", "complete", "grid", "er"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--rows", type=int, default=3)
    p.add_argument("--cols", type=int, default=3)
    p.add_argument("--prob", type=float, default=0.5)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("sample", help="draw perfect samples or run a chain")
    p.add_argument("--method", choices=sorted(_METHOD_KINDS) + ["cftp"], required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1, help="cftp: samples to draw")
    p.add_argument("--steps", type=int, default=1000, help="chain runs: steps")
    p.add_argument("--start", choices=["empty", "full"], default="empty")
    p.add_argument("--trace", default=None, help="write a trace (.csv or .npy)")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--max-doubling", type=int, default=30,
                   help="cftp abort: largest T as a power of two")
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(_SUITES))
    p.add_argument("--graph", default=None)
    p.add_argument("--random", type=int, default=20,
                   help="number of random instances when no graph is given")
    p.add_argument("--n", type=int, default=5, help="max vertices of random instances")
    p.add_argument("--m", type=int, default=None, help="max edges of random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100000, help="monotone: total trials")
    p.add_argument("--transforms", type=int, default=3,
                   help="holant: random transforms per instance")
    p.add_argument("--enum-cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("mixing", help="exact mixing time vs the spectral bound")
    p.add_argument("--graph", required=True)
    p.add_argument("--chain", choices=sorted(_METHOD_KINDS), default="ef-wrc")
    p.add_argument("--epsilon", type=float, default=0.25)
    p.add_argument("--state-cap", type=int, default=DEFAULT_STATE_CAP)
    p.set_defaults(fn=cmd_mixing)

    p = sub.add_parser("paths", help="canonical-path reports")
    p.add_argument("action", choices=["congestion"])
    p.add_argument("--graph", required=True)
    p.add_argument("--max-edges", type=int, default=7)
    p.set_defaults(fn=cmd_paths)

    p = sub.add_parser("bench", help="throughput and coalescence statistics")
    p.add_argument("--graph", default=None)
    p.add_argument("--rows", type=int, default=10)
    p.add_argument("--cols", type=int, default=10)
    p.add_argument("--steps", type=int, default=100000)
    p.add_argument("--seeds", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, GraphFormatError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
