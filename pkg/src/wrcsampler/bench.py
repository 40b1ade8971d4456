"""Throughput measurements: chain steps per second per kernel backend, and
CFTP coalescence statistics."""

from __future__ import annotations

import importlib
import time

import numpy as np

from .model import WeightedGraph, params_from_ising


def available_backends() -> dict[str, object]:
    out = {}
    try:
        out["cython"] = importlib.import_module("wrcsampler._kernel")
    except ImportError:
        pass
    out["python"] = importlib.import_module("wrcsampler._kernel_py")
    return out


_RUN_FNS = {
    "ef-wrc": ("ef_wrc_run", "wrc"),
    "ef-sg": ("ef_sg_run", "sg"),
    "sb": ("sb_run", "wrc"),
    "sw-wrc": ("sw_wrc_run", "wrc"),
    "sw-ising": ("sw_ising_run", "ising"),
}


def bench_chains(g: WeightedGraph, steps: int, seed: int,
                 backends: dict | None = None) -> list[dict]:
    """Time ``steps`` transitions of every chain on every backend.

    The pure-Python backend gets a step count scaled down by 100 (it exists
    for fallback and verification, not speed); rates are still per step.
    """
    if backends is None:
        backends = available_backends()
    w, s = params_from_ising(g)
    log_lam = np.log(w.lam)
    records = []
    for backend_name, impl in backends.items():
        factor = 1 if backend_name == "cython" else 100
        n_steps = max(steps // factor, 1)
        for chain, (fn_name, model) in _RUN_FNS.items():
            fn = getattr(impl, fn_name)
            if model == "ising":
                state = np.zeros(g.n, dtype=np.uint8)
                args = (g.eu, g.ev, g.adj_off, g.adj_v, g.adj_e, w.p, log_lam)
            elif model == "sg":
                state = np.zeros(g.m, dtype=np.uint8)
                args = (g.eu, g.ev, g.adj_off, g.adj_v, g.adj_e, s.p, s.eta)
            else:
                state = np.zeros(g.m, dtype=np.uint8)
                args = (g.eu, g.ev, g.adj_off, g.adj_v, g.adj_e, w.p, log_lam)
            t0 = time.perf_counter()
            fn(*args, state, n_steps, seed, 0)
            elapsed = time.perf_counter() - t0
            records.append({
                "check": "bench-chain",
                "backend": backend_name,
                "chain": chain,
                "steps": n_steps,
                "seconds": elapsed,
                "steps_per_sec": n_steps / elapsed if elapsed > 0 else float("inf"),
            })
    return records


def bench_cftp(g: WeightedGraph, n_seeds: int, seed0: int,
               backends: dict | None = None) -> list[dict]:
    """Coalescence-time distribution and sampling rate across seeds."""
    if backends is None:
        backends = available_backends()
    w, _ = params_from_ising(g)
    log_lam = np.log(w.lam)
    records = []
    for backend_name, impl in backends.items():
        count = n_seeds if backend_name == "cython" else max(n_seeds // 100, 1)
        tstars = []
        t0 = time.perf_counter()
        for i in range(count):
            _, tstar, _ = impl.cftp_run(g.eu, g.ev, g.adj_off, g.adj_v,
                                        g.adj_e, w.p, log_lam, seed0 + i)
            tstars.append(tstar)
        elapsed = time.perf_counter() - t0
        arr = np.array(tstars, dtype=np.float64)
        records.append({
            "check": "bench-cftp",
            "backend": backend_name,
            "seeds": count,
            "seconds": elapsed,
            "samples_per_sec": count / elapsed if elapsed > 0 else float("inf"),
            "tstar_median": float(np.median(arr)),
            "tstar_mean": float(arr.mean()),
            "tstar_p99": float(np.percentile(arr, 99)),
            "tstar_max": int(arr.max()),
        })
    return records
