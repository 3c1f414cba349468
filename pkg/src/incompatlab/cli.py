"""Command-line front end and experiment orchestration.

Subcommands: jm-threshold, witness, scan, assemblage, gbit-demo, selftest.
Reports are JSON (default) or CSV, schema-stable: top-level keys are always
``command``, ``config``, ``results``, ``residuals``, ``duration_s``.  Every
numeric claim in a results payload sits next to the tolerance it was computed
at.  When a seed is part of the effective config the report must be
byte-identical across runs, so ``duration_s`` is then written as null and the
wall-clock time goes to stderr instead.

Exit codes: 0 success, 1 engine or numeric failure (including selftest
failures), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import __version__
from .backend import active_backend
from .config import Tolerances, load_tolerances
from .errors import DomainError, NumericError
from .feasibility import FeasStatus
from .observables import (anticommutation_check, bloch_observable,
                          clifford_generators, pauli, unsharp_povm)
from . import gptfrag, jointmeas, witness as wit
from .assemblage import (lhs_feasible, load_assemblage, save_assemblage,
                         simplex_embeddable_verdict, steer)
from .simplex import LpStatus

QUANTUM_SETS = ("paulis", "clifford:<n>", "axes:<x,y,z;...>")
ALL_SETS = QUANTUM_SETS + ("gbit-fiducials",)


class UsageError(Exception):
    """Bad command-line input (exit code 2)."""


def parse_observable_set(spec: str):
    """Resolve a --set spec to quantum observables or the gbit marker.

    Returns ``("quantum", [observables])`` or ``("gbit", None)``.
    """
    if spec == "paulis":
        return "quantum", [pauli("x"), pauli("y"), pauli("z")]
    if spec == "gbit-fiducials":
        return "gbit", None
    if spec.startswith("clifford:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad clifford count in {spec!r}") from None
        try:
            return "quantum", clifford_generators(n)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
    if spec.startswith("axes:"):
        obs = []
        for part in spec.split(":", 1)[1].split(";"):
            comps = [float(v) for v in part.split(",")]
            if len(comps) != 3:
                raise UsageError(f"axis {part!r} must have three components")
            vec = np.asarray(comps)
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise UsageError(f"axis {part!r} is the zero vector")
            obs.append(bloch_observable(vec / norm))
        if not obs:
            raise UsageError("axes spec lists no axes")
        return "quantum", obs
    raise UsageError(f"unknown observable set {spec!r}; expected one of {ALL_SETS}")


def parse_grid(spec: str) -> list[float]:
    if not spec.strip():
        return []
    try:
        grid = [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad eta grid {spec!r}") from None
    for eta in grid:
        if not 0.0 <= eta <= 1.0:
            raise UsageError(f"grid value {eta} outside [0, 1]")
    return grid


def parse_delta(spec: str | None) -> list[float] | float:
    if spec is None:
        return 0.0
    try:
        vals = [float(v) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad delta list {spec!r}") from None
    return vals if len(vals) > 1 else (vals[0] if vals else 0.0)


def resolve_state(spec: str, dim: int) -> np.ndarray:
    if spec == "phi-plus":
        return wit.maximally_entangled(dim)
    if spec == "mixed":
        return np.eye(dim * dim, dtype=complex) / (dim * dim)
    raise UsageError(f"unknown state spec {spec!r}; expected phi-plus or mixed")


# ---------------------------------------------------------------------------
# report plumbing

def _config_echo(args, cfg: Tolerances, extra: dict) -> dict:
    base = {
        "version": __version__,
        "backend": active_backend(),
        "seed": getattr(args, "seed", None),
        "format": args.format,
        "tolerances": {k: v for k, v in cfg.__dict__.items()},
    }
    base.update(extra)
    return base


def make_report(command: str, args, cfg: Tolerances, config_extra: dict,
                results: dict, residuals: dict, started: float) -> dict:
    elapsed = time.perf_counter() - started
    seeded = getattr(args, "seed", None) is not None
    if seeded:
        print(f"[{command}] wall-clock {elapsed:.3f}s", file=sys.stderr)
    return {
        "command": command,
        "config": _config_echo(args, cfg, config_extra),
        "results": results,
        "residuals": residuals,
        "duration_s": None if seeded else round(elapsed, 6),
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


SCAN_HEADERS = ["engine", "eta", "status", "value", "residual", "iterations"]


def render_csv(report: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    rows = report["results"].get("rows")
    if rows is not None:
        writer.writerow(SCAN_HEADERS)
        for row in rows:
            writer.writerow([row.get(h, "") for h in SCAN_HEADERS])
    else:
        writer.writerow(["key", "value"])
        for key in sorted(report["results"]):
            writer.writerow([key, report["results"][key]])
    return buf.getvalue()


def emit(report: dict, args) -> None:
    text = render_csv(report) if args.format == "csv" else render_json(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threshold_results(result, eta_tol: float) -> dict:
    payload = {
        "eta_star": result.eta_star,
        "eta_tol": eta_tol,
        "bracket": [result.lower, result.upper],
        "evaluations": result.evaluations,
    }
    if result.undecided_band is not None:
        payload["undecided_band"] = list(result.undecided_band)
    return payload


# ---------------------------------------------------------------------------
# subcommands

def cmd_jm_threshold(args, cfg: Tolerances) -> dict:
    started = time.perf_counter()
    kind, obs = parse_observable_set(args.set)
    eta_tol = args.eta_tol if args.eta_tol is not None else cfg.eta_tol
    if kind == "gbit":
        result = gptfrag.gpt_jm_threshold(gptfrag.gbit(), gptfrag.gbit_fiducials(),
                                          eta_tol, cfg)
        engine = "gpt-lp"
    else:
        result = jointmeas.jm_threshold(obs, eta_tol, cfg)
        engine = "dykstra"
    results = _threshold_results(result, eta_tol)
    results["engine"] = engine
    residuals = {"bracket_width": result.width}
    return make_report("jm-threshold", args, cfg, {"set": args.set},
                       results, residuals, started)


def cmd_witness(args, cfg: Tolerances) -> dict:
    started = time.perf_counter()
    if not 2 <= args.n <= 5:
        raise UsageError(f"--n must be in [2, 5], got {args.n}")
    if not 0.0 <= args.eta <= 1.0:
        raise UsageError(f"--eta must lie in [0, 1], got {args.eta}")
    alice = clifford_generators(args.n)
    dim = alice[0].shape[0]
    rho = resolve_state(args.state, dim)
    delta = parse_delta(args.delta)
    bob, opt_value = wit.optimize_bob(rho, alice, eta=args.eta, cfg=cfg)
    report = wit.witness_value(rho, [args.eta * a for a in alice], bob,
                               delta=delta, eta=args.eta, cfg=cfg)
    results = {
        "n": args.n,
        "eta": args.eta,
        "value": report.value,
        "value_atol": 1e-9,
        "optimized_value": opt_value,
        "bound_local": report.bound_local,
        "bound_quantum": report.bound_quantum,
        "sos_gap": report.sos_gap,
        "sos_gap_atol": cfg.sos_crosscheck,
        "violation": report.violation,
        "delta": report.delta_used,
        "per_y_terms": report.per_y_terms,
    }
    residuals = {"optimizer_vs_witness": abs(opt_value - report.value)
                 if not np.asarray(delta).any() else None}
    return make_report("witness", args, cfg,
                       {"n": args.n, "eta": args.eta, "state": args.state},
                       results, residuals, started)


def _scan_row_jm(obs, eta: float, cfg: Tolerances) -> dict:
    verdict = jointmeas.jm_feasible([unsharp_povm(a, eta) for a in obs], cfg=cfg)
    return {"engine": "jm", "eta": eta, "status": verdict.status.value,
            "value": "", "residual": verdict.residual,
            "iterations": verdict.iterations}


def _scan_row_jm_gbit(eta: float, cfg: Tolerances) -> dict:
    frag = gptfrag.gbit()
    sol = gptfrag.gpt_jm_feasible(
        frag, [gptfrag.smear_measurement(frag, m, eta)
               for m in gptfrag.gbit_fiducials()], cfg)
    status = "feasible" if sol.status is LpStatus.FEASIBLE else "infeasible"
    return {"engine": "jm", "eta": eta, "status": status, "value": "",
            "residual": sol.max_violation, "iterations": sol.pivots}


def _scan_row_lhs(obs, eta: float, cfg: Tolerances) -> dict:
    dim = obs[0].shape[0]
    rho = wit.maximally_entangled(dim)
    asm = steer(rho, [unsharp_povm(a, eta) for a in obs], cfg)
    verdict = lhs_feasible(asm, cfg=cfg)
    return {"engine": "lhs", "eta": eta, "status": verdict.status.value,
            "value": "", "residual": verdict.residual,
            "iterations": verdict.iterations}


def _scan_row_witness(obs, eta: float, cfg: Tolerances) -> dict:
    dim = obs[0].shape[0]
    rho = wit.maximally_entangled(dim)
    _, value = wit.optimize_bob(rho, obs, eta=eta, cfg=cfg)
    bound = float(2 ** (len(obs) - 1))
    return {"engine": "witness", "eta": eta,
            "status": "violated" if value > bound + 1e-9 else "satisfied",
            "value": value, "residual": "", "iterations": ""}


def cmd_scan(args, cfg: Tolerances) -> dict:
    started = time.perf_counter()
    kind, obs = parse_observable_set(args.set)
    grid = parse_grid(args.grid)
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    unknown = set(engines) - {"jm", "lhs", "witness"}
    if unknown:
        raise UsageError(f"unknown engines {sorted(unknown)}; expected jm, lhs, witness")
    if kind == "gbit" and set(engines) - {"jm"}:
        raise UsageError("gbit-fiducials supports only the jm engine")
    rows = []
    for engine in engines:
        for eta in grid:
            if engine == "jm":
                rows.append(_scan_row_jm_gbit(eta, cfg) if kind == "gbit"
                            else _scan_row_jm(obs, eta, cfg))
            elif engine == "lhs":
                rows.append(_scan_row_lhs(obs, eta, cfg))
            else:
                rows.append(_scan_row_witness(obs, eta, cfg))
    rows.sort(key=lambda r: (r["engine"], r["eta"]))
    results = {"rows": rows, "feasibility_tol": cfg.feas_tol}
    return make_report("scan", args, cfg,
                       {"set": args.set, "grid": grid, "engines": engines},
                       results, {}, started)


def cmd_assemblage(args, cfg: Tolerances) -> dict:
    started = time.perf_counter()
    if args.infile:
        asm = load_assemblage(args.infile, cfg)
        source = {"in": args.infile}
    else:
        kind, obs = parse_observable_set(args.set)
        if kind != "quantum":
            raise UsageError("assemblage requires a quantum observable set")
        if not 0.0 <= args.eta <= 1.0:
            raise UsageError(f"--eta must lie in [0, 1], got {args.eta}")
        dim = obs[0].shape[0]
        rho = resolve_state(args.state, dim)
        asm = steer(rho, [unsharp_povm(a, args.eta) for a in obs], cfg)
        source = {"set": args.set, "eta": args.eta, "state": args.state}
    if args.export:
        save_assemblage(asm, args.export)
    verdict = lhs_feasible(asm, cfg=cfg)
    embed = simplex_embeddable_verdict(asm, cfg)
    results = {
        "n": asm.n,
        "dim_b": asm.dim_b,
        "lhs_status": verdict.status.value,
        "lhs_residual": verdict.residual,
        "lhs_tol": cfg.feas_tol,
        "iterations": verdict.iterations,
        "simplex_embeddable": embed.embeddable,
        "exported": args.export,
    }
    return make_report("assemblage", args, cfg, source, results,
                       {"lhs_residual": verdict.residual}, started)


def cmd_gbit_demo(args, cfg: Tolerances) -> dict:
    started = time.perf_counter()
    eta_tol = args.eta_tol if args.eta_tol is not None else cfg.eta_tol
    frag = gptfrag.gbit()
    result = gptfrag.gpt_jm_threshold(frag, gptfrag.gbit_fiducials(), eta_tol, cfg)
    quantum_pair = 1.0 / np.sqrt(2.0)
    results = {
        "gbit_eta_star": result.eta_star,
        "eta_tol": eta_tol,
        "bracket": [result.lower, result.upper],
        "quantum_pair_eta_star": quantum_pair,
        "strictly_more_incompatible_than_quantum":
            bool(result.upper < quantum_pair),
        "maximal_incompatibility_reference": 0.5,
    }
    return make_report("gbit-demo", args, cfg, {}, results,
                       {"bracket_width": result.width}, started)


# ---------------------------------------------------------------------------
# selftest

def _check(name: str, worst: float, tol: float) -> dict:
    return {"invariant": name, "worst": float(worst), "tolerance": tol,
            "passed": bool(worst <= tol)}


def _rand_herm(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (x + x.conj().T) / 2.0


def _rand_dichotomic(rng, d):
    w, v = np.linalg.eigh(_rand_herm(rng, d))
    signs = np.where(rng.normal(size=d) >= 0.0, 1.0, -1.0)
    return (v * signs) @ v.conj().T


def _rand_density(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    r = x @ x.conj().T
    return r / r.trace().real


def selftest_checks(rng, cfg: Tolerances, tol_override: float | None):
    from . import matcore

    def tol(default: float) -> float:
        return default if tol_override is None else tol_override

    checks = []

    worst = 0.0
    for _ in range(25):
        d = int(rng.integers(2, 9))
        h = _rand_herm(rng, d)
        w, v = matcore.her_eig(h, cfg)
        scale = max(1.0, float(np.linalg.norm(h)))
        worst = max(worst, float(np.linalg.norm((v * w) @ v.conj().T - h)) / scale,
                    float(np.linalg.norm(v.conj().T @ v - np.eye(d))))
    checks.append(_check("matcore.eig_reconstruction", worst, tol(1e-9)))

    worst = 0.0
    for _ in range(10):
        p1 = matcore.psd_project(_rand_herm(rng, 4), cfg)
        p2 = matcore.psd_project(p1, cfg)
        worst = max(worst, float(np.abs(p2 - p1).max()))
    checks.append(_check("matcore.psd_idempotent", worst, tol(1e-10)))

    worst = 0.0
    for _ in range(10):
        a, b = _rand_herm(rng, 3), _rand_herm(rng, 4)
        worst = max(worst, abs(matcore.op_norm(matcore.tensor(a, b), cfg)
                               - matcore.op_norm(a, cfg) * matcore.op_norm(b, cfg)))
    checks.append(_check("matcore.opnorm_multiplicative", worst, tol(1e-9)))

    worst = 0.0
    for _ in range(10):
        a, b = _rand_herm(rng, 4), _rand_herm(rng, 4)
        val = complex(np.einsum("ij,ji->", a, b))
        worst = max(worst, abs(val.imag))
    checks.append(_check("matcore.hs_inner_real", worst, tol(1e-12)))

    worst = 0.0
    for _ in range(5):
        m1, m2 = _rand_herm(rng, 6), _rand_herm(rng, 6)
        al, be = rng.normal(), rng.normal()
        lhs = matcore.partial_trace(al * m1 + be * m2, 2, 3, "B")
        rhs = al * matcore.partial_trace(m1, 2, 3, "B") \
            + be * matcore.partial_trace(m2, 2, 3, "B")
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    checks.append(_check("matcore.partial_trace_linear", worst, tol(1e-12)))

    worst = 0.0
    for eta in np.linspace(0.0, 1.0, 6):
        for axis in "xyz":
            p = unsharp_povm(pauli(axis), float(eta))
            worst = max(worst,
                        float(np.abs(p.plus + p.minus - np.eye(2)).max()),
                        -float(min(np.linalg.eigvalsh(p.plus).min(),
                                   np.linalg.eigvalsh(p.minus).min(), 0.0)))
    checks.append(_check("observables.unsharp_povm_exact", worst, tol(1e-14)))

    worst = 0.0
    for n in (2, 3, 4, 5, 6):
        _, res = anticommutation_check(clifford_generators(n))
        worst = max(worst, res)
    checks.append(_check("observables.clifford_anticommuting", worst, tol(1e-10)))

    worst = 0.0
    for n, da in ((2, 2), (3, 2), (3, 4)):
        alice = [_rand_dichotomic(rng, da) for _ in range(n)]
        bob = [_rand_dichotomic(rng, da) for _ in range(2 ** (n - 1))]
        rho = _rand_density(rng, da * da)
        omegas = wit.omega_factors(alice, cfg)
        rep = wit.witness_value(rho, alice, bob, delta=0.0, eta=1.0, cfg=cfg)
        worst = max(worst, rep.value - sum(omegas), -rep.sos_gap)
    checks.append(_check("witness.sos_universal_bound", worst, tol(1e-8)))

    worst = 0.0
    for n in (2, 3, 4):
        alice = clifford_generators(n)
        rho = wit.maximally_entangled(alice[0].shape[0])
        _, val = wit.optimize_bob(rho, alice, eta=1.0, cfg=cfg)
        expect = wit.quantum_optimum(n, 1.0)
        worst = max(worst, abs(val - expect) / expect,
                    abs(wit.boundary_eta(rho, alice, cfg) - n ** -0.5))
    checks.append(_check("witness.clifford_optimum", worst, tol(1e-8)))

    verdict = jointmeas.jm_feasible(
        [unsharp_povm(pauli("x"), 0.5), unsharp_povm(pauli("z"), 0.5)], cfg=cfg)
    probs = wit.sign_pattern_probs(verdict.certificate, np.eye(2) / 2.0, cfg)
    checks.append(_check("witness.sign_pattern_normalization",
                         abs(probs.sum() - 1.0), tol(1e-9)))

    jm_ok = (verdict.status is FeasStatus.FEASIBLE)
    verdict_hi = jointmeas.jm_feasible(
        [unsharp_povm(pauli("x"), 0.8), unsharp_povm(pauli("z"), 0.8)], cfg=cfg)
    jm_ok = jm_ok and (verdict_hi.status is FeasStatus.INFEASIBLE)
    checks.append(_check("jointmeas.pair_verdicts", 0.0 if jm_ok else 1.0, tol(0.5)))

    worst = max(abs(jointmeas.qubit_unbiased_threshold([(1, 0, 0), (0, 0, 1)])
                    - 2 ** -0.5),
                abs(jointmeas.qubit_unbiased_threshold(np.eye(3)) - 3 ** -0.5))
    checks.append(_check("jointmeas.closed_form_orthogonal", worst, tol(1e-12)))

    rho = wit.maximally_entangled(2)
    paulis = [pauli(a) for a in "xyz"]
    agree = True
    for eta in (0.5, 0.7):
        povms = [unsharp_povm(a, eta) for a in paulis]
        jm_status = jointmeas.jm_feasible(povms, cfg=cfg).status
        lhs_status = lhs_feasible(steer(rho, povms, cfg), cfg=cfg).status
        agree = agree and (jm_status == lhs_status)
    checks.append(_check("assemblage.verdict_equivalence",
                         0.0 if agree else 1.0, tol(0.5)))

    frag = gptfrag.gbit()
    fids = gptfrag.gbit_fiducials()
    sharp = gptfrag.gpt_jm_feasible(frag, fids, cfg)
    noisy = gptfrag.gpt_jm_feasible(
        frag, [gptfrag.smear_measurement(frag, m, 0.4) for m in fids], cfg)
    simp = gptfrag.simplicial_gpt(3)
    pair = [gptfrag.measurement_from_effect(simp, simp.effects[i]) for i in (1, 2)]
    classical = gptfrag.gpt_jm_feasible(simp, pair, cfg)
    gpt_ok = (sharp.status is LpStatus.INFEASIBLE
              and noisy.status is LpStatus.FEASIBLE
              and classical.status is LpStatus.FEASIBLE)
    worst_lp = max(noisy.max_violation, classical.max_violation)
    checks.append(_check("gptfrag.lp_verdicts", 0.0 if gpt_ok else 1.0, tol(0.5)))
    checks.append(_check("gptfrag.lp_selfcheck_residual", worst_lp, tol(1e-9)))

    return checks


def cmd_selftest(args, cfg: Tolerances) -> dict:
    started = time.perf_counter()
    rng = np.random.default_rng(args.seed)
    checks = selftest_checks(rng, cfg, args.tol)
    failures = [c["invariant"] for c in checks if not c["passed"]]
    results = {
        "checks": checks,
        "failed": failures,
        "passed_count": sum(1 for c in checks if c["passed"]),
        "total": len(checks),
    }
    report = make_report("selftest", args, cfg,
                         {"tol_override": args.tol}, results,
                         {"failures": len(failures)}, started)
    report["_exit"] = 1 if failures else 0
    return report


# ---------------------------------------------------------------------------
# parser and entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="incompatlab",
        description="joint measurability, incompatibility witnesses, and "
                    "steering assemblages at desk scale")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=None):
        p.add_argument("--tol", type=float, default=None,
                       help="override the feasibility/assertion tolerance")
        p.add_argument("--tol-file", default=None,
                       help="tolerance JSON file (also $INCOMPATLAB_TOL_FILE)")
        p.add_argument("--seed", type=int, default=seed_default,
                       help="seed; fixing it makes the report byte-stable")
        p.add_argument("--out", default=None, help="write the report here")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("jm-threshold", help="critical unsharpness of a set")
    p.add_argument("--set", required=True,
                   help=f"observable set: one of {ALL_SETS}")
    p.add_argument("--eta-tol", type=float, default=None)
    common(p)

    p = sub.add_parser("witness", help="optimal witness configuration")
    p.add_argument("--n", type=int, required=True, help="settings, 2..5")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--delta", default=None,
                   help="offset(s): one value or comma list per sign pattern")
    p.add_argument("--state", default="phi-plus", choices=("phi-plus", "mixed"))
    common(p)

    p = sub.add_parser("scan", help="grid of verdicts/values over eta")
    p.add_argument("--set", required=True)
    p.add_argument("--grid", required=True, help="comma-separated etas")
    p.add_argument("--engines", default="jm", help="comma list of jm,lhs,witness")
    common(p)

    p = sub.add_parser("assemblage", help="steer and test an assemblage")
    p.add_argument("--set", default="paulis")
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--state", default="phi-plus", choices=("phi-plus", "mixed"))
    p.add_argument("--in", dest="infile", default=None,
                   help="load an assemblage file instead of steering")
    p.add_argument("--export", default=None, help="write the assemblage here")
    common(p)

    p = sub.add_parser("gbit-demo", help="maximal GPT incompatibility demo")
    p.add_argument("--eta-tol", type=float, default=None)
    common(p)

    p = sub.add_parser("selftest", help="run the invariant suite")
    common(p, seed_default=0)

    return parser


_DISPATCH = {
    "jm-threshold": cmd_jm_threshold,
    "witness": cmd_witness,
    "scan": cmd_scan,
    "assemblage": cmd_assemblage,
    "gbit-demo": cmd_gbit_demo,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_tolerances(args.tol_file)
    except FileNotFoundError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1
    except (KeyError, ValueError) as exc:
        print(f"error: bad tolerance file: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command != "selftest" and args.tol is not None:
            import dataclasses
            cfg = dataclasses.replace(cfg, feas_tol=args.tol, lp_tol=args.tol)
        report = _DISPATCH[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, FileNotFoundError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1
    code = int(report.pop("_exit", 0))
    emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
