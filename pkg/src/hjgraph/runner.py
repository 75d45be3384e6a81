"""End-to-end experiment driver: build space, audit the Hamiltonian, compute
the critical data and Mane potentials, evolve, and report convergence.

Exit codes: 0 success; 1 convergence tolerance missed; 2 invalid
configuration; 3 numerical blowup; 4 invariant violation.
"""

import os

import numpy as np

from . import _kernels
from .asymptotics import convergence_report, phi_infinity, phi_minus
from .config import build_space, resolve_profile, validate_config
from .errors import ConfigError, HJGraphError, InvariantViolationError
from .evolution import solve
from .fileio import (dump_json, write_convergence_csv, write_critical_csv,
                     write_node_function_csv, write_trace_csv)
from .graph import NodeFunction
from .hamiltonian import (check_assumptions, hamiltonian_from_dict,
                          load_hamiltonian)
from .weakkam import (CriticalData, default_tol_cmp, mane_potential,
                      stationary_residual, stationary_solution)

EXIT_OK = 0
EXIT_GAP = 1
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_INVARIANT = 4

MAX_POTENTIAL_FILES = 8


def _build_hamiltonian(graph, cfg):
    desc = cfg.hamiltonian
    if "file" in desc:
        path = desc["file"]
        if not os.path.isabs(path):
            path = os.path.join(cfg.base_dir, path)
        return load_hamiltonian(graph, path, resolve_profile)
    return hamiltonian_from_dict(graph, desc, resolve_profile, cfg.base_dir)


def run_experiment(cfg, output_dir=None):
    """Run one experiment; returns (exit_code, summary dict).

    All declared output files are written into the output directory and
    listed in summary.json.
    """
    out_dir = output_dir or cfg.output_dir
    if not os.path.isabs(out_dir):
        out_dir = os.path.join(cfg.base_dir, out_dir)
    os.makedirs(out_dir, exist_ok=True)

    summary = {"schema_version": 1, "seed": cfg.seed,
               "backend": _kernels.backend_name()}
    files = []

    def emit(name, writer, *args):
        writer(*args, os.path.join(out_dir, name))
        files.append(name)

    try:
        graph = build_space(cfg.space, cfg.base_dir)
        ham = _build_hamiltonian(graph, cfg)
        u0 = NodeFunction(graph, resolve_profile(graph, cfg.initial_data,
                                                 cfg.base_dir))
    except (HJGraphError, ValueError, OSError) as exc:
        summary["error"] = str(exc)
        summary["exit_code"] = EXIT_CONFIG
        dump_json(summary, os.path.join(out_dir, "summary.json"))
        return EXIT_CONFIG, summary

    report = check_assumptions(ham, graph, u0=u0)
    crit = CriticalData.compute(ham, graph, cfg.tol_aubry)
    c, aubry = crit.c, crit.aubry
    emit("critical.csv", write_critical_csv, graph, ham.zero_values(),
         crit.sigma.values, aubry)

    summary.update({
        "c": c,
        "aubry_size": int(len(aubry)),
        "aubry_members": [int(v) for v in aubry],
        "tol_aubry": cfg.tol_aubry,
        "L": report.L,
        "K": report.K,
        "assumptions_ok": report.all_ok,
        "h": graph.max_edge_length,
        "n_vertices": graph.n_vertices,
    })

    for y in aubry[:MAX_POTENTIAL_FILES]:
        s_pot = mane_potential(graph, ham, c, int(y))
        emit(f"s_potential_{int(y)}.csv", write_node_function_csv, s_pot)

    invariants = {}

    def record(name, ok, value):
        invariants[name] = {"ok": bool(ok), "value": float(value)}

    try:
        trace = solve(graph, ham, u0, cfg.t_end,
                      store_every=cfg.store_every,
                      cfl_factor=cfg.cfl_factor)
    except InvariantViolationError as exc:
        summary["error"] = str(exc)
        summary["failed_invariant"] = exc.name
        summary["exit_code"] = EXIT_INVARIANT
        dump_json(summary, os.path.join(out_dir, "summary.json"))
        return EXIT_INVARIANT, summary
    except (HJGraphError, ValueError) as exc:
        # blowup, leaving a tabulated grid, or a too-stiff run
        summary["error"] = str(exc)
        summary["exit_code"] = EXIT_BLOWUP
        dump_json(summary, os.path.join(out_dir, "summary.json"))
        return EXIT_BLOWUP, summary

    dt = trace.dt
    tol = cfg.tol_convergence
    if tol is None:
        tol = 10.0 * (graph.max_edge_length + dt)
    tol_cmp = cfg.tol_compare or default_tol_cmp(u0.values)

    emit("trace.csv", write_trace_csv, trace)
    dump_json({"dt": dt, "cfl_factor": trace.cfl_factor,
               "steps": trace.metadata["n_steps"], "scheme": trace.scheme,
               "store_every": trace.store_every,
               "backend": trace.metadata["backend"],
               "halvings": trace.metadata["halvings"]},
              os.path.join(out_dir, "trace_meta.json"))
    files.append("trace_meta.json")

    phi_m = phi_minus(trace, c)
    emit("phi_minus.csv", write_node_function_csv, phi_m)
    phi_inf = phi_infinity(graph, ham, c, phi_m, aubry)
    emit("phi_infinity.csv", write_node_function_csv, phi_inf)

    conv = convergence_report(trace, c, phi_inf, tol, aubry=aubry)
    emit("convergence.csv", write_convergence_csv, conv.times, conv.gaps)

    # invariant: u(t) + c t never dips below phi_minus (exact by definition)
    shifted = trace.snapshots + c * trace.times[:, None]
    dip = float(np.max(phi_m.values[None, :] - shifted))
    record("phi-minus-lower-bound", dip <= 1e-12, dip)

    # invariant: the profiles agree on the Aubry set
    gap_a = float(np.max(np.abs(phi_inf.values[aubry] - phi_m.values[aubry])))
    record("phi-match-on-aubry", gap_a <= tol_cmp, gap_a)

    # invariant: phi_infinity is a discrete solution up to scheme tolerance
    sub, sup = stationary_residual(graph, ham, phi_inf, c,
                                   tol_aubry=cfg.tol_aubry)
    record("phi-infinity-residual", max(sub, sup) <= tol, max(sub, sup))

    # invariant: sandwich between v0 - c t -+ M, with slack for the O(h)
    # residual of the trapezoid profile drifting linearly in t
    _, v0, _ = stationary_solution(graph, ham, cfg.tol_aubry)
    m_const = float(np.max(np.abs(u0.values - v0.values)))
    slack = tol * (1.0 + trace.times[:, None])
    lower = v0.values[None, :] - c * trace.times[:, None] - m_const - slack
    upper = v0.values[None, :] - c * trace.times[:, None] + m_const + slack
    sandwich_violation = float(max(np.max(trace.snapshots - upper),
                                   np.max(lower - trace.snapshots)))
    record("sandwich-barrier", sandwich_violation <= 0.0, sandwich_violation)

    record("aubry-monotone", conv.aubry_monotone_ok,
           conv.max_aubry_violation)

    summary.update({
        "dt": dt,
        "t_end": cfg.t_end,
        "n_steps": trace.metadata["n_steps"],
        "store_every": trace.store_every,
        "cfl_factor": trace.cfl_factor,
        "halvings": trace.metadata["halvings"],
        "tol_convergence": tol,
        "tol_compare": tol_cmp,
        "final_gap": conv.final_gap,
        "t_star": conv.t_star,
        "invariants": invariants,
        "files": sorted(files),
    })

    failed = [name for name, item in invariants.items() if not item["ok"]]
    if failed:
        summary["failed_invariant"] = failed[0]
        summary["exit_code"] = EXIT_INVARIANT
    elif conv.final_gap > tol:
        summary["exit_code"] = EXIT_GAP
    else:
        summary["exit_code"] = EXIT_OK
    dump_json(summary, os.path.join(out_dir, "summary.json"))
    return summary["exit_code"], summary


def run_suite(paths, overrides=None, suite_path=None):
    """Run several experiment configs; failures stay isolated per entry."""
    if not paths:
        raise ConfigError(["suite: no configuration files given"])
    entries = []
    for path in paths:
        entry = {"config": str(path)}
        try:
            cfg = validate_config(path, overrides)
            code, summary = run_experiment(cfg)
            entry["exit_code"] = code
            entry["final_gap"] = summary.get("final_gap")
            if "error" in summary:
                entry["error"] = summary["error"]
        except ConfigError as exc:
            entry["exit_code"] = EXIT_CONFIG
            entry["error"] = "; ".join(exc.errors)
        except HJGraphError as exc:
            entry["exit_code"] = EXIT_INVARIANT
            entry["error"] = str(exc)
        entries.append(entry)
    suite = {"experiments": entries,
             "all_pass": all(e["exit_code"] == EXIT_OK for e in entries)}
    if suite_path:
        dump_json(suite, suite_path)
    return (EXIT_OK if suite["all_pass"] else EXIT_GAP), suite
