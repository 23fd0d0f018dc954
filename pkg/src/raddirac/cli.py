"""Command-line front end.

Every subcommand accepts ``--config FILE`` (a JSON object whose keys are
the long flag names with dashes or underscores); explicit flags override
file values.  Exit codes: 0 success, 1 an invariant check failed,
2 invalid configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .assembly import assemble, dump_system
from .eigensolve import NumericalFailure
from .potentials import PhysicsConstants, QuantumState, make_potential
from .studies import (SCHEMES, StudyReport, benchmark_tables, convergence_study, critical_report,
                      default_interface, operator_comparison, pollution_study, provenance, resolution_count,
                      solve_states)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
RESIDUAL_LIMIT = 1e-9
POTENTIAL_PARAMS = ("Z", "V0", "lambda", "De", "re", "alpha", "R", "k")


class ConfigError(ValueError):
    pass


def int_list(text) -> list[int]:
    """``"20,30,40"`` or ``"10..200"`` (step 10) or ``"10..200:5"``."""
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    text = str(text).strip()
    if ".." in text:
        span, _, step = text.partition(":")
        a, b = span.split("..")
        return list(range(int(a), int(b) + 1, int(step) if step else 10))
    return [int(x) for x in text.split(",") if x]


def float_list(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x]


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--c", type=float, help="speed of light in atomic units (default 137.035999084)")
    p.add_argument("--mass", type=float, help="particle mass in electron masses (default 1)")
    p.add_argument("--out", help="output directory (studies) or file (solve)")
    p.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    p.add_argument("--jobs", type=int, help="parallel worker processes (default: available cores)")
    p.add_argument("-v", "--verbose", action="store_true")


def _add_potential(p: argparse.ArgumentParser, default: dict | None = None):
    shown = "" if default is None else " (default " + " ".join(f"{k}={v}" for k, v in default.items()) + ")"
    p.add_argument("--potential", default=None,
                   choices=("coulomb", "gaussian", "yukawa", "hellmann", "morse", "harmonic"),
                   help=f"potential kind{shown}")
    for name in POTENTIAL_PARAMS:
        p.add_argument(f"--{name}", type=float, dest=f"pot_{name}")
    p.set_defaults(_pot_default=default)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="raddirac", description="Radial Dirac eigenvalue solver.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="bound states of one potential")
    _add_common(p)
    _add_potential(p)
    p.add_argument("--kappa", type=int, help="relativistic angular quantum number (default -1)")
    p.add_argument("--n-states", type=int, help="number of states (default 1)")
    p.add_argument("--N1", type=int, help="core block size (default 40)")
    p.add_argument("--N2", type=int, help="Laguerre block size (default 40)")
    p.add_argument("--L", type=float, help="interface radius (default: chosen from the potential)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta", type=float, help="fixed Laguerre scale")
    g.add_argument("--adapt", action="store_true", default=None, help="adapt beta per state (default)")
    p.add_argument("--mode", choices=("idom", "sdom", "raw"), help="operator formulation (default idom)")
    p.add_argument("--dump-matrices", help="write the assembled matrices (at the first state's beta) here")

    p = sub.add_parser("converge", help="error versus basis size")
    _add_common(p)
    _add_potential(p, {"kind": "coulomb", "Z": 92.0})
    p.add_argument("--kappa", type=int)
    p.add_argument("--scheme", choices=SCHEMES, help="default allsm")
    p.add_argument("--N1-list", help="e.g. 80 or 40,80")
    p.add_argument("--N2-list", help="e.g. 20..60 or 20,30,40")
    p.add_argument("--n-states", type=int)
    p.add_argument("--L", type=float)
    p.add_argument("--beta", type=float, help="fixed beta for llsm/slm (default 1)")

    p = sub.add_parser("pollution", help="spurious states under upper/lower DOF mismatch")
    _add_common(p)
    _add_potential(p, {"kind": "coulomb", "Z": 1.0})
    p.add_argument("--kappa", type=int)
    p.add_argument("--n-upper", type=int)
    p.add_argument("--k-lower", help="e.g. 30,45,60,90")
    p.add_argument("--mode", choices=("idom", "raw"))
    p.add_argument("--beta", type=float)
    p.add_argument("--L", type=float)
    p.add_argument("--n-states", type=int)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("compare-operators", help="IDOM versus SDOM on the harmonic oscillator")
    _add_common(p)
    p.add_argument("--kappa", type=int, help="default -2")
    p.add_argument("--N-list", help="default 30,50,70")
    p.add_argument("--k", type=float, dest="pot_k")

    p = sub.add_parser("resolution", help="count of resolved hydrogen levels versus DOF")
    _add_common(p)
    p.add_argument("--basis", choices=("laguerre", "legendre"), help="default legendre")
    p.add_argument("--L", help="truncation radii, e.g. 30 or 30,60")
    p.add_argument("--dof", help="e.g. 100..200:50")
    p.add_argument("--tol", type=float)
    p.add_argument("--Z", type=float, dest="pot_Z")

    p = sub.add_parser("critical-lambda", help="Yukawa critical screening")
    _add_common(p)
    p.add_argument("--V0", type=float)
    p.add_argument("--kappa", type=int)
    p.add_argument("--bracket", help="lo,hi (default 1.0,1.3)")
    p.add_argument("--tol", type=float)

    p = sub.add_parser("bench", help="reproduce a benchmark table")
    _add_common(p)
    p.add_argument("--table", choices=("hellmann", "morse", "gaussian", "harmonic"))
    return ap


def resolve(args: argparse.Namespace) -> dict:
    """Merge config file values under explicit flags."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    for k, v in vars(args).items():
        if k.startswith("_") or k in ("config", "command"):
            continue
        if v is not None:
            cfg[k] = v
    default = getattr(args, "_pot_default", None)
    cfg.setdefault("potential", None if default is None else dict(default))
    return cfg


def _consts(cfg) -> PhysicsConstants:
    return PhysicsConstants(c=cfg.get("c", PhysicsConstants().c), mass=cfg.get("mass", 1.0))


def _potential(cfg):
    kind = cfg.get("potential")
    params = {}
    if isinstance(kind, dict):
        # config file form {"kind": ..., "Z": ...}
        params = {k: v for k, v in kind.items() if k != "kind"}
        kind = kind.get("kind")
    if kind is None:
        raise ConfigError("--potential is required")
    params.update({k: cfg[k] for k in POTENTIAL_PARAMS if k in cfg})
    params.update({k[4:]: v for k, v in cfg.items() if k.startswith("pot_")})
    return make_potential(kind, **params)


def _jobs(cfg) -> int:
    return int(cfg.get("jobs") or os.cpu_count() or 1)


def _emit_report(rep: StudyReport, cfg: dict) -> int:
    fmt = cfg.get("format", "json")
    if cfg.get("out"):
        for p in rep.write(cfg["out"], formats=(fmt,) if cfg.get("format") else ("csv", "json")):
            print(f"wrote {p}", file=sys.stderr)
    else:
        print(rep.to_csv() if fmt == "csv" else rep.to_json())
    if not rep.ok:
        failed = [k for k, v in rep.checks.items() if not v]
        print(f"invariant checks failed: {failed or 'incomplete study'}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_solve(cfg) -> int:
    consts = _consts(cfg)
    pot = _potential(cfg)
    kappa = int(cfg.get("kappa", -1))
    if kappa == 0:
        raise ConfigError("kappa must be nonzero")
    n_states = int(cfg.get("n_states", 1))
    if n_states < 1:
        raise ConfigError("n-states must be >= 1")
    n0 = abs(kappa) if kappa < 0 else kappa + 1
    QuantumState(n0, kappa)
    beta = cfg.get("beta")
    if cfg.get("adapt"):
        beta = None
    mode = cfg.get("mode", "idom")
    L = cfg.get("L")
    L = default_interface(pot, consts) if L is None else float(L)
    N1, N2 = int(cfg.get("N1", 40)), int(cfg.get("N2", 40))
    s = solve_states(pot, kappa, n_states, consts=consts, N1=N1, N2=N2, L=L, beta=beta, mode=mode)
    resolved = {"potential": pot.params(), "kappa": kappa, "n_states": n_states, "N1": N1, "N2": N2, "L": L,
                "beta": "adaptive" if beta is None else beta, "mode": mode,
                "c": consts.c, "mass": consts.mass}
    if cfg.get("dump_matrices"):
        lay = s.layout.with_beta(s.betas[0]) if s.betas else s.layout
        dump_system(assemble(lay, pot, kappa, consts, mode), cfg["dump_matrices"])
    rec = {"schema": 1, "config": resolved, "provenance": provenance(resolved, consts), **s.record()}
    for i, (E, e) in enumerate(zip(s.energies, s.entries)):
        print(f"state {i}: E = {E:.12g}  beta = {s.betas[i]:g}  residual = {e.residual:.2e}", file=sys.stderr)
    if not s.energies:
        print("no bound states in the window", file=sys.stderr)
    out = cfg.get("out")
    fmt = cfg.get("format", "json")
    if fmt == "csv":
        lines = ["index,energy,beta,residual"] + [f"{i},{E!r},{b!r},{e.residual!r}" for i, (E, b, e)
                                                  in enumerate(zip(s.energies, s.betas, s.entries))]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(rec, indent=2, default=lambda x: x.item() if hasattr(x, "item") else str(x))
    if out:
        Path(out).write_text(text)
    else:
        print(text)
    bad = [e.residual for e in s.entries if mode == "idom" and not e.residual < RESIDUAL_LIMIT]
    if bad:
        print(f"residual check failed: {bad}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_converge(cfg) -> int:
    consts = _consts(cfg)
    pot = _potential(cfg)
    rep = convergence_study(pot, int(cfg.get("kappa", -1)), cfg.get("scheme", "allsm"),
                            int_list(cfg.get("N1_list", "80")), int_list(cfg.get("N2_list", "20..60")),
                            n_states=int(cfg.get("n_states", 5)), consts=consts, L=cfg.get("L"),
                            beta=float(cfg.get("beta", 1.0)), jobs=_jobs(cfg))
    return _emit_report(rep, cfg)


def cmd_pollution(cfg) -> int:
    consts = _consts(cfg)
    pot = _potential(cfg)
    rep = pollution_study(pot, int(cfg.get("kappa", -1)), int(cfg.get("n_upper", 60)),
                          int_list(cfg.get("k_lower", "30,45,60,90")), cfg.get("mode", "raw"),
                          n_states=int(cfg.get("n_states", 10)), L=float(cfg.get("L", 1.0)),
                          beta=float(cfg.get("beta", 0.25)), tol=float(cfg.get("tol", 1e-3)), consts=consts)
    return _emit_report(rep, cfg)


def cmd_compare(cfg) -> int:
    consts = _consts(cfg)
    pot = make_potential("harmonic", k=cfg.get("pot_k", 1.0))
    rep = operator_comparison(pot, int(cfg.get("kappa", -2)), int_list(cfg.get("N_list", "30,50,70")),
                              consts=consts)
    return _emit_report(rep, cfg)


def cmd_resolution(cfg) -> int:
    consts = _consts(cfg)
    basis = cfg.get("basis", "legendre")
    basis = "legendre-truncated" if basis == "legendre" else basis
    pot = make_potential("coulomb", Z=cfg.get("pot_Z", 1.0))
    rep = resolution_count(basis, int_list(cfg.get("dof", "100..200:50")), float_list(cfg.get("L", "30")),
                           tol=float(cfg.get("tol", 1e-6)), pot=pot, consts=consts, jobs=_jobs(cfg))
    return _emit_report(rep, cfg)


def cmd_critical(cfg) -> int:
    consts = _consts(cfg)
    bracket = float_list(cfg.get("bracket", "1.0,1.3"))
    if len(bracket) != 2 or not bracket[0] < bracket[1]:
        raise ConfigError("bracket must be lo,hi with lo < hi")
    rep = critical_report(float(cfg.get("V0", 1.0)), int(cfg.get("kappa", -1)), tuple(bracket),
                          tol=float(cfg.get("tol", 1e-6)), consts=consts)
    print(f"lambda_crit = {rep.summary['lambda_crit']:.7f}", file=sys.stderr)
    return _emit_report(rep, cfg)


def cmd_bench(cfg) -> int:
    table = cfg.get("table")
    if table is None:
        raise ConfigError("--table is required")
    kw = {}
    if table in ("hellmann",):
        kw["jobs"] = _jobs(cfg)
    if table == "morse":
        kw["consts_c"] = _consts(cfg).c
    else:
        kw["consts"] = _consts(cfg)
    return _emit_report(benchmark_tables(table, **kw), cfg)


COMMANDS = {"solve": cmd_solve, "converge": cmd_converge, "pollution": cmd_pollution,
            "compare-operators": cmd_compare, "resolution": cmd_resolution, "critical-lambda": cmd_critical,
            "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    # LinAlgError is a ValueError, so numerical failures are caught first
    except (NumericalFailure, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
