"""Batch front-end: algebra checks, aux solves, seed builds, forging, Fock checks.

Exit codes: 0 success, 2 a Hermiticity gate refused (expected for
breakdown pairs), 3 numerical failure or missing input, 4 config error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import algebra as la
from . import auxode, fock, forge, seeds as seeds_mod
from .config import ConfigError, RunConfig
from .jsonio import canonical_json, csv_rows
from .profiles import DomainError, profile_b
from .tables import BASE_BRACKETS, KNOWN_BRACKETS

EXIT_OK = 0
EXIT_REFUSED = 2
EXIT_NUMERICAL = 3
EXIT_CONFIG = 4


def _write(out_dir: Path, name: str, text: str):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


# ---------------------------------------------------------------------------
# check-algebra
# ---------------------------------------------------------------------------

def _bracket_from_table(structure, a, b):
    return np.einsum("abk,a,b->k", structure,
                     la.basis_element(a).coeffs, la.basis_element(b).coeffs)


def cmd_check_algebra(args) -> int:
    structure = la.STRUCTURE.copy()
    if args.self_test_corrupt:
        i, j = la.ALIASES["K1"], la.ALIASES["K3"]
        structure[i, j, la.ALIASES["K4"]] += 0.25j

    checks = []
    ok = True

    anti = float(np.max(np.abs(structure + structure.transpose(1, 0, 2))))
    checks.append(("antisymmetry", anti, anti == 0.0))

    jac = float(la.jacobi_defect_exact())
    checks.append(("jacobi-identity", jac, jac == 0.0))

    n_verified = 0
    first_bad = None
    for table in (BASE_BRACKETS, KNOWN_BRACKETS):
        for a, b, rhs in table:
            got = _bracket_from_table(structure, a, b)
            want = np.zeros(la.DIM, dtype=complex)
            for lab, c in rhs.items():
                want[la.ALIASES.get(lab, la.INDEX.get(lab))] = 1j * c
            dev = float(np.max(np.abs(got - want)))
            n_verified += 1
            if dev != 0.0 and first_bad is None:
                first_bad = (a, b, dev)
    checks.append(("bracket-table", 0.0 if first_bad is None else first_bad[2],
                   first_bad is None))

    rep = fock.build_rep(args.fock_n, max(1, args.fock_n // 6))
    worst, bad_pair = fock.commutator_table_check(rep, tol=1e-10)
    checks.append((f"fock-commutators-N{args.fock_n}", worst, bad_pair is None))

    grid = np.linspace(0.0, 10.0, 64)
    H = seeds_mod.hamiltonian_path(profile_b(), grid)
    pt_dev = max(
        float(np.max(np.abs(la.pt_transform(H.at(i)).coeffs - H.at(i).coeffs)))
        for i in range(len(grid)))
    checks.append(("pt-symmetry-of-H", pt_dev, pt_dev == 0.0))

    ok = all(c[2] for c in checks)
    for name, value, passed in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {value:.3e}")
    if first_bad is not None:
        print(f"FAIL first failing bracket: [{first_bad[0]},{first_bad[1]}]")
    if bad_pair is not None:
        print(f"FAIL first failing Fock commutator: [{bad_pair[0]},{bad_pair[1]}]")
    print(f"{'PASS' if ok else 'FAIL'} algebra suite, {n_verified} brackets verified")

    if args.out:
        report = {
            "command": "check-algebra",
            "checks": [{"name": n, "value": v, "pass": bool(p)} for n, v, p in checks],
            "brackets_verified": n_verified,
            "pass": bool(ok),
        }
        _write(Path(args.out), "algebra_report.json", canonical_json(report))
    return EXIT_OK if ok else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# solve-aux
# ---------------------------------------------------------------------------

def cmd_solve_aux(args) -> int:
    cfg = RunConfig.from_file(args.config)
    out = Path(args.out)
    profile = cfg.profile()
    grid = cfg.grid()
    k = cfg.raw["pair"]["k"]
    x0 = cfg.raw["pair"]["x0"]
    tol = cfg.tolerances["tol_ode"]

    x = auxode.constrained_x2(profile, k, x0, grid)
    r_aux1 = auxode.aux1_residual(x, profile)
    r_ep = auxode.ep_transform_check(x, k, profile)
    _write(out, "x_constrained.csv", x.to_csv())

    chi0 = float(np.sqrt(1.0 + x0 ** 2))
    chidot0 = float(x0 * x.derivs.real[0] / chi0)
    chi = auxode.solve_aux2(profile, -1.0 / k, chi0, chidot0, grid)
    r_aux2 = auxode.aux2_residual(chi, profile, -1.0 / k)
    _write(out, "chi.csv", chi.to_csv())

    spec = seeds_mod.SeedSpec(2 if k * x0 > 0 else 3, k)
    f_plus, f_minus = seeds_mod.f_pm(spec, profile, x)
    rho0, rhodot0 = cfg.raw["rho_initial"]
    rho_p = auxode.solve_rho_ep(f_plus, rho0, rhodot0)
    rho_m = auxode.solve_rho_ep(f_minus, rho0, rhodot0)
    r_rho = max(auxode.rho_ep_residual(rho_p, f_plus),
                auxode.rho_ep_residual(rho_m, f_minus))
    _write(out, "rho_plus.csv", rho_p.to_csv())
    _write(out, "rho_minus.csv", rho_m.to_csv())

    report = {
        "command": "solve-aux",
        "config_hash": cfg.hash,
        "tolerances": cfg.tolerances,
        "profile_label": "artifact test profile (not from the source model)",
        "residuals": {
            "aux1_on_constrained_flow": r_aux1,
            "aux2_transformed": r_aux2,
            "ep_transform": r_ep,
            "rho_flows": r_rho,
        },
        "pass": bool(max(r_aux1, r_aux2, r_ep, r_rho) <= 10 * tol),
    }
    _write(out, "aux_report.json", canonical_json(report))
    print(f"{'PASS' if report['pass'] else 'FAIL'} aux residuals: "
          f"aux1={r_aux1:.2e} aux2={r_aux2:.2e} ep={r_ep:.2e} rho={r_rho:.2e}")
    return EXIT_OK if report["pass"] else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# build-seed
# ---------------------------------------------------------------------------

def _seed_report(cfg: RunConfig, index: int, sign: int):
    seed = cfg.build_seed(index, sign)
    H = seeds_mod.hamiltonian_path(cfg.profile(), seed.grid)
    h = seeds_mod.tdde_rhs(seed.group, H)
    anti = float(h.max_hermiticity_residual())
    closed = seed.h_path
    match = float(np.max(np.abs(h.coeffs.real - closed.coeffs.real)))
    stride = max(1, len(seed.grid) // 16)
    return seed, {
        "index": index,
        "k": cfg.raw["pair"]["k"],
        "sign": sign,
        "constants": cfg.raw["constants"],
        "max_anti_hermitian_residual": anti,
        "max_deviation_from_closed_form": match,
        "f_samples": {
            "t": list(seed.grid[::stride]),
            "f_plus": list(seed.f_plus.values.real[::stride]),
            "f_minus": list(seed.f_minus.values.real[::stride]),
        },
    }


def cmd_build_seed(args) -> int:
    cfg = RunConfig.from_file(args.config)
    out = Path(args.out)
    pair = cfg.raw["pair"]
    wanted = [args.seed] if args.seed else [pair["eta"], pair["eta_tilde"]]
    tol = cfg.tolerances["tol_gate"]
    worst = 0.0
    for idx in wanted:
        sign = pair["sign_eta"] if idx == pair["eta"] else pair["sign_eta_tilde"]
        seed, rep = _seed_report(cfg, idx, sign)
        rep["config_hash"] = cfg.hash
        rep["tolerances"] = cfg.tolerances
        rep["pass"] = bool(rep["max_anti_hermitian_residual"] <= tol)
        worst = max(worst, rep["max_anti_hermitian_residual"])
        _write(out, f"seed_{idx}.json", canonical_json(rep))
        _write(out, f"seed_{idx}_f.csv", csv_rows(
            ("t", "f_plus", "f_minus"),
            zip(seed.grid, seed.f_plus.values.real, seed.f_minus.values.real)))
        print(f"{'PASS' if rep['pass'] else 'FAIL'} seed {idx}: "
              f"anti-Hermitian residual {rep['max_anti_hermitian_residual']:.2e}")
    return EXIT_OK if worst <= tol else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# forge
# ---------------------------------------------------------------------------

def run_forge(cfg: RunConfig, n_max=None):
    pair = cfg.build_pair()
    inv_eta = cfg.gate_invariant_for(pair.eta)
    inv_tilde = cfg.gate_invariant_for(pair.eta_tilde)
    n_max = cfg.raw["n_max"] if n_max is None else n_max
    return forge.iterate(pair, n_max, inv_eta, inv_tilde,
                         cfg.tolerances["tol_gate"])


def ledger_to_dict(cfg: RunConfig, ledger) -> dict:
    entries = []
    for (kind, n), e in sorted(ledger.entries.items()):
        rec = {"kind": kind, "n": n,
               "admitted": bool(e.admitted),
               "refused": not bool(e.admitted),
               "gate_residual": float(e.gate_residual)}
        if e.admitted:
            rec["max_anti_hermitian_residual_of_h"] = float(
                e.h.max_hermiticity_residual())
            rec["f_plus"] = list(e.h.coeffs[:, la.ALIASES["K1"]].real)
            rec["f_minus"] = list(e.h.coeffs[:, la.ALIASES["K2"]].real)
        else:
            rec["max_anti_hermitian_component"] = float(
                np.max(np.abs(e.anti_hermitian.coeffs)))
        entries.append(rec)
    admitted_eta = [e.n for e in ledger.admitted("eta")]
    admitted_tilde = [e.n for e in ledger.admitted("eta_tilde")]
    return {
        "command": "forge",
        "config_hash": cfg.hash,
        "tolerances": cfg.tolerances,
        "n_max": ledger.n_max,
        "grid": {"t0": float(ledger.pair.grid[0]),
                 "t1": float(ledger.pair.grid[-1]),
                 "samples": int(len(ledger.pair.grid))},
        "series": {
            "eta": {"admitted": admitted_eta, "count": len(admitted_eta)},
            "eta_tilde": {"admitted": admitted_tilde, "count": len(admitted_tilde)},
        },
        "refused_at": {f"{k}:{d:+d}": int(n)
                       for (k, d), n in ledger.refused_at.items()},
        "entries": entries,
        "verdict": "REFUSED" if ledger.any_refused else "PASS",
    }


def cmd_forge(args) -> int:
    cfg = RunConfig.from_file(args.config)
    if args.nmax is not None:
        cfg.raw["n_max"] = args.nmax
    if args.tol is not None:
        cfg.raw["tolerances"]["tol_gate"] = args.tol
    out = Path(args.out)
    ledger = run_forge(cfg)
    doc = ledger_to_dict(cfg, ledger)
    _write(out, "ledger.json", canonical_json(doc))

    grid = ledger.pair.grid
    for n in range(-ledger.n_max, ledger.n_max + 1):
        cols = [("t", grid)]
        for kind in ("eta", "eta_tilde"):
            e = ledger.get(kind, n)
            if e is not None and e.admitted:
                cols.append((f"{kind}_f_plus", e.h.coeffs[:, la.ALIASES["K1"]].real))
                cols.append((f"{kind}_f_minus", e.h.coeffs[:, la.ALIASES["K2"]].real))
        if len(cols) > 1:
            _write(out, f"h_series_{n}.csv", csv_rows(
                [c[0] for c in cols], zip(*[c[1] for c in cols])))

    for kind in ("eta", "eta_tilde"):
        ns = [e.n for e in ledger.admitted(kind)]
        print(f"{kind} series: {len(ns)} admitted entries "
              f"(n in [{min(ns)}, {max(ns)}])" if ns else f"{kind} series: empty")
    for (kind, direction), n in sorted(ledger.refused_at.items()):
        e = ledger.get(kind, n)
        print(f"REFUSED {kind} series at n = {n} "
              f"(gate residual {e.gate_residual:.3e})")
    return EXIT_REFUSED if ledger.any_refused else EXIT_OK


# ---------------------------------------------------------------------------
# verify-fock
# ---------------------------------------------------------------------------

def cmd_verify_fock(args) -> int:
    cfg = RunConfig.from_file(args.config)
    if args.fock_n is not None:
        cfg.raw["fock"]["n"] = args.fock_n
        cfg.raw["fock"]["n_guard"] = max(1, args.fock_n // 4)
    out = Path(args.out)
    if not (out / "ledger.json").exists():
        print("ERROR: no ledger.json in the output directory; run forge first")
        return EXIT_NUMERICAL

    fk = cfg.raw["fock"]
    rep = fock.build_rep(fk["n"], fk["n_guard"])
    ledger = run_forge(cfg)
    grid = ledger.pair.grid
    idxs = [i for i in range(0, len(grid), fk["stride"])
            if grid[i] <= fk["t_max"]] or [0]

    fingerprints = {}
    metric = {}
    for e in ledger.admitted():
        metric[(e.kind, e.n)] = fock.metric_positivity(e.group, rep, idxs[0])
        try:
            fingerprints[(e.kind, e.n)] = forge.metric_fingerprint(
                e.group, rep, idxs[0])
        except OverflowError:
            pass
    fp_drift = {}
    for kind in ("eta", "eta_tilde"):
        base = fingerprints.get((kind, 0))
        if base is None:
            continue
        for (k2, n), fp in fingerprints.items():
            if k2 == kind:
                fp_drift[f"{kind}:{n}"] = forge.fingerprint_distance(fp, base)

    inv = cfg.gate_invariant_for(ledger.pair.eta)
    drift = fock.invariant_spectrum_drift(inv, rep, idxs)

    rows = []
    for i in idxs:
        M = fock.element_matrix(rep, inv.coeffs[i])
        lam = np.sort(np.linalg.eigvalsh(rep.restrict((M + M.conj().T) / 2)))[:10]
        rows.append([grid[i]] + list(lam))
    _write(out, "spectra.csv", csv_rows(
        ["t"] + [f"lambda_{j+1}" for j in range(10)], rows))

    statuses = {f"{k}:{n}": m["status"] for (k, n), m in metric.items()}
    n_pos = sum(1 for s in statuses.values() if s == "positive")
    n_ind = sum(1 for s in statuses.values() if s == "indeterminate")
    report = {
        "command": "verify-fock",
        "config_hash": cfg.hash,
        "tolerances": cfg.tolerances,
        "fock": fk,
        "invariant_spectrum_drift": float(drift),
        "metric_min_eigenvalue": {f"{k}:{n}": m["min_eigenvalue"]
                                  for (k, n), m in metric.items()},
        "metric_status": statuses,
        "metric_fingerprint_drift": fp_drift,
        "pass": bool(drift <= 1e-4),
    }
    _write(out, "fock_report.json", canonical_json(report))
    print(f"{'PASS' if report['pass'] else 'FAIL'} fock checks: "
          f"spectrum drift {drift:.2e}; metric positivity certified on "
          f"{n_pos}/{len(statuses)} entries ({n_ind} beyond double precision)")
    return EXIT_OK if report["pass"] else EXIT_NUMERICAL


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def cmd_report(args) -> int:
    out = Path(args.out)
    import json as _json
    summary = {"command": "report", "sections": {}}
    for name in ("algebra_report.json", "aux_report.json", "ledger.json",
                 "fock_report.json"):
        path = out / name
        if not path.exists():
            continue
        doc = _json.loads(path.read_text())
        verdict = doc.get("verdict") or ("PASS" if doc.get("pass") else "FAIL")
        summary["sections"][name] = verdict
        print(f"{name}: {verdict}")
    if not summary["sections"]:
        print("ERROR: nothing to report in", out)
        return EXIT_NUMERICAL
    _write(out, "report.json", canonical_json(summary))
    return EXIT_OK


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dysonforge",
        description="batch runner for the iterated similarity-map engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-algebra", help="verify structure constants")
    p.add_argument("--fock-n", type=int, default=24)
    p.add_argument("--out", default=None)
    p.add_argument("--self-test-corrupt", action="store_true",
                   help="inject a fault to exercise the checker")
    p.set_defaults(func=cmd_check_algebra)

    p = sub.add_parser("solve-aux", help="run the auxiliary ODE solvers")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_solve_aux)

    p = sub.add_parser("build-seed", help="build seed maps and their reports")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_build_seed)

    p = sub.add_parser("forge", help="run the gated iteration")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--nmax", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_forge)

    p = sub.add_parser("verify-fock", help="operator-level verification")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fock-n", type=int, default=None)
    p.set_defaults(func=cmd_verify_fock)

    p = sub.add_parser("report", help="summarize reports in an output directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"CONFIG ERROR: {exc}")
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"CONFIG ERROR: {exc}")
        return EXIT_CONFIG
    except (DomainError, auxode.IntegrationAbort, OverflowError,
            FloatingPointError) as exc:
        print(f"NUMERICAL FAILURE: {exc}")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
