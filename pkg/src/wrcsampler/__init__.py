"""Sampling and verification toolkit for ferromagnetic Ising models with
consistent external fields, built on the weighted random cluster and
subgraph-world representations of the same distribution.

Highlights: exact enumeration oracles, four Markov chains with a shared
deterministic RNG protocol, a monotone coupling-from-the-past perfect
sampler, spectral verification of the comparison inequalities between the
chains, and canonical-path congestion for the subgraph-world dynamics.
The hot kernels run in a compiled extension when available
(``wrcsampler.backend.active_backend()`` says which).
"""

from .backend import active_backend
from .cftp import (CoalescenceFailure, RandomnessRecord, RandomnessTape,
                   cftp_sample, cftp_sample_checked, cftp_sample_detailed,
                   check_monotone, perfect_ising_sample,
                   perfect_ising_sample_detailed, phi)
from .dynamics import (ChainKind, ef_step, p_i_to_r, p_r_to_i, run_chain,
                       sb_step, sw_step)
from .model import (CapExceeded, EdgeSubset, GraphFormatError, SgParams,
                    SpinConfig, WeightedGraph, WrcParams, bits_from_int,
                    bits_to_hex, components, connected, empty_subset,
                    full_subset, int_from_bits, log_ising_weight,
                    log_sg_weight, log_wrc_weight, odd_vertices,
                    params_from_ising, parse_graph, perturb_sg, read_graph,
                    write_graph)
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [
    "CapExceeded", "ChainKind", "CoalescenceFailure", "EdgeSubset",
    "GraphFormatError", "RandomnessRecord", "RandomnessTape", "RngStream",
    "SgParams", "SpinConfig", "WeightedGraph", "WrcParams",
    "active_backend", "bits_from_int", "bits_to_hex", "cftp_sample",
    "cftp_sample_checked", "cftp_sample_detailed", "check_monotone",
    "components", "connected", "ef_step", "empty_subset", "full_subset",
    "int_from_bits", "log_ising_weight", "log_sg_weight", "log_wrc_weight",
    "odd_vertices", "p_i_to_r", "p_r_to_i", "params_from_ising",
    "parse_graph", "perfect_ising_sample", "perfect_ising_sample_detailed",
    "perturb_sg", "phi", "read_graph", "run_chain", "sb_step", "sw_step",
    "write_graph", "__version__",
]
