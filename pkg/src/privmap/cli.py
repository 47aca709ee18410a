"""Command-line front end.

Exit codes: 0 affirmative/success, 1 definitive negative verdict, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from . import kernels
from .channels import (
    apply,
    channel_from_json,
    channel_to_json,
    channels_equal,
    complementary,
    depolarizing,
    full_dephasing,
    minimal_kraus,
)
from .codes import (
    code_from_json,
    logical_bloch_state,
    n_qubit_private_code,
    paper_subsystem_code,
    resolve_encoder,
    subspace_code,
)
from .linalg import (
    DimensionError,
    Tolerance,
    default_tolerance,
    haar_isometry,
    matrix_from_json,
    matrix_to_json,
    pauli_decompose,
    trace_norm,
)
from .privacy import (
    NotPrivate,
    certify_theorem2,
    heisenberg_private_check,
    is_operator_private,
    is_private,
    privacy_defect,
    search_private_subspace,
)
from .qec import (
    complementarity_pair_report,
    is_von_neumann_measurement,
    knill_laflamme_check,
    operator_knill_laflamme_check,
)

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2
DEMOS = ("two-qubit-dephasing", "n-qubit-dephasing", "depolarizing", "complementarity-failure")


class InputError(Exception):
    pass


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _parse(loader, path, what):
    try:
        return loader(_load_json(path))
    except (ValueError, DimensionError) as exc:
        raise InputError(f"invalid {what} in {path}: {exc}") from None


def _pauli_text(m) -> str:
    m = np.asarray(m)
    d = m.shape[0]
    if m.shape[0] == m.shape[1] and d > 1 and d & (d - 1) == 0 and np.allclose(m, m.conj().T):
        terms = pauli_decompose(m, cutoff=1e-10)
        parts = []
        for w, c in terms.items():
            c = complex(np.round(c, 10))
            coef = f"{c.real:g}" if abs(c.imag) < 1e-10 else f"({c.real:g}{c.imag:+g}j)"
            parts.append(f"{coef}*{w}")
        return " + ".join(parts) if parts else "0"
    return np.array2string(np.round(m, 6), max_line_width=120)


def _check(checks, name, ok, observed=None):
    checks.append({"check": name, "ok": bool(ok), "observed": observed})
    return ok


# demos ---------------------------------------------------------------------


def _demo_two_qubit(tol: Tolerance, trials: int, seed: int) -> dict:
    checks: list = []
    circuit = resolve_encoder()
    code, frame, sigma_a = paper_subsystem_code()
    lam = full_dephasing(2)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(100):
        r = rng.normal(size=3)
        r *= rng.random() ** (1 / 3) / np.linalg.norm(r)
        worst = max(worst, trace_norm(apply(lam, logical_bloch_state(*r)) - np.eye(4) / 4))
    _check(checks, "Lambda(rho_L) = II/4 on 100 Bloch vectors", worst <= tol.absolute, worst)
    _check(checks, "logical frame XX, YI, ZX is a Pauli frame", frame.check(tol))
    private, rho_0 = is_private(lam, code, sigma_a, tol)
    _check(checks, "code is private for Lambda", private)
    _check(checks, "rho_0 = II/4", tol.close(rho_0, np.eye(4) / 4), _pauli_text(rho_0))
    cert = certify_theorem2(lam, code, sigma_a, tol)
    _check(checks, "lambda is 8x8", cert.lam.shape == (8, 8), list(cert.lam.shape))
    _check(checks, "lambda is unitary", cert.unitary_flag, cert.unitarity_residual)
    op = is_operator_private(lam, code, tol)
    _check(checks, "not an operator private subsystem", not op.per_state, op.defect)
    _, best = search_private_subspace(lam, 2, trials, seed)
    _check(checks, "no private 2-dim subspace found", best.defect > 1e-3, best.defect)
    return {
        "demo": "two-qubit-dephasing",
        "circuit": list(circuit.gates),
        "encoder_images": {k: f"{v[0].real:+g} {v[1]}" for k, v in circuit.images.items()},
        "rho_0": _pauli_text(rho_0),
        "lambda_shape": list(cert.lam.shape),
        "unitary_flag": cert.unitary_flag,
        "lambda": matrix_to_json(cert.lam),
        "checks": checks,
    }


def _demo_n_qubit(n: int, tol: Tolerance, trials: int, seed: int) -> dict:
    checks: list = []
    lam = full_dephasing(n)
    code, sigma_a = n_qubit_private_code(n)
    dim = 2 ** n
    private, rho_0 = is_private(lam, code, sigma_a, tol)
    _check(checks, f"subsystem code private for {n}-qubit dephasing", private)
    _check(checks, f"rho_0 = I/{dim}", tol.close(rho_0, np.eye(dim) / dim))
    cert = certify_theorem2(lam, code, sigma_a, tol)
    _check(checks, "certificate lambda is an isometry", cert.isometry_residual <= 1e-8, cert.isometry_residual)
    _, best = search_private_subspace(lam, 2, trials, seed)
    _check(checks, "no private 2-dim subspace found", best.defect > 1e-3, best.defect)
    return {"demo": f"n-qubit-dephasing({n})", "lambda_shape": list(cert.lam.shape), "checks": checks}


def _demo_depolarizing(n_dim: int, tol: Tolerance, samples: int, seed: int) -> dict:
    checks: list = []
    phi = depolarizing(n_dim)
    rng = np.random.default_rng(seed)
    k = min(2, n_dim)
    all_private = all_certified = all_heisenberg = True
    for _ in range(samples):
        code = subspace_code(haar_isometry(n_dim, k, rng))
        private, rho_0 = is_private(phi, code, np.ones((1, 1)), tol)
        all_private &= private and tol.close(rho_0, np.eye(n_dim) / n_dim)
        cert = certify_theorem2(phi, code, np.ones((1, 1)), tol)
        all_certified &= cert.isometry_residual <= 1e-8
        all_heisenberg &= heisenberg_private_check(phi, code, rho_0, tol)
    _check(checks, f"all {samples} sampled subspaces private with rho_0 = I/{n_dim}", all_private)
    _check(checks, "all certificates isometric", all_certified)
    _check(checks, "Heisenberg-picture condition holds", all_heisenberg)
    return {"demo": f"depolarizing({n_dim})", "checks": checks}


def _demo_complementarity(tol: Tolerance) -> dict:
    checks: list = []
    lam = full_dephasing(2)
    code, _, sigma_a = paper_subsystem_code()
    comp = complementary(lam)
    mk = minimal_kraus(comp, tol)
    _check(checks, "complement has 4 minimal Kraus operators", mk.num_kraus == 4, mk.num_kraus)
    _check(checks, "complement is a von Neumann measurement", is_von_neumann_measurement(comp, tol))
    rep = complementarity_pair_report(lam, code, sigma_a, tol)
    _check(checks, "private for Lambda", rep.private_for_phi)
    _check(checks, "not operator-correctable for the complement", not rep.operator_correctable_for_complement)
    return {"demo": "complementarity-failure", "report": rep.to_json(), "checks": checks}


def _parse_demo(name: str):
    m = re.fullmatch(r"([a-z-]+)(?:\((\d+)\))?", name)
    if not m or m.group(1) not in DEMOS:
        raise InputError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    return m.group(1), (int(m.group(2)) if m.group(2) else None)


def cmd_demo(args, tol):
    name, arg = _parse_demo(args.name)
    trials = args.trials if args.trials is not None else 2000
    seed = args.seed if args.seed is not None else 7
    if name == "two-qubit-dephasing":
        report = _demo_two_qubit(tol, trials, seed)
    elif name == "n-qubit-dephasing":
        n = arg or args.qubits or 3
        if n < 2:
            raise InputError("n-qubit-dephasing needs n >= 2")
        report = _demo_n_qubit(n, tol, trials, seed)
    elif name == "depolarizing":
        n_dim = arg or args.dim or 2
        if n_dim < 2:
            raise InputError("depolarizing needs dimension >= 2")
        report = _demo_depolarizing(n_dim, tol, args.samples, seed)
    else:
        report = _demo_complementarity(tol)
    report["backend"] = kernels.BACKEND
    ok = all(c["ok"] for c in report["checks"])
    report["all_reproduced"] = ok
    return report, EXIT_OK if ok else EXIT_NEGATIVE


# commands -------------------------------------------------------------------


def _load_sigma_a(args, code):
    if args.sigma_a:
        sigma = _parse(matrix_from_json, args.sigma_a, "sigma_a matrix")
        if sigma.shape != (code.dim_a, code.dim_a):
            raise InputError("sigma_a does not match the code's A dimension")
        return sigma
    return np.eye(code.dim_a, dtype=complex) / code.dim_a


def _channel_and_code(args):
    if not args.channel or not args.code:
        raise InputError("--channel and --code are required")
    phi = _parse(channel_from_json, args.channel, "channel")
    code = _parse(code_from_json, args.code, "code")
    if phi.dim_in != code.dim_s:
        raise InputError(f"channel dimension {phi.dim_in} does not match code dimension {code.dim_s}")
    return phi, code


def cmd_certify(args, tol):
    phi, code = _channel_and_code(args)
    mode = args.mode
    if mode == "subspace" and code.dim_a != 1:
        raise InputError("subspace mode needs a code with dim_a = 1")
    if mode == "operator":
        op = is_operator_private(phi, code, tol)
        report = {
            "mode": mode,
            "operator_private_per_state": op.per_state,
            "operator_private_state_independent": op.state_independent,
            "defect": op.defect,
            "a_dependence": op.a_dependence,
        }
        return report, EXIT_OK if op.per_state else EXIT_NEGATIVE
    sigma_a = _load_sigma_a(args, code)
    defect = privacy_defect(phi, code, sigma_a)
    private, rho_0 = is_private(phi, code, sigma_a, tol)
    report = {"mode": mode, "private": private, "defect_report": defect.to_json()}
    if not private:
        return report, EXIT_NEGATIVE
    try:
        report["certificate"] = certify_theorem2(phi, code, sigma_a, tol).to_json()
    except NotPrivate as exc:
        report["private"] = False
        report["error"] = str(exc)
        return report, EXIT_NEGATIVE
    if mode == "subspace":
        report["heisenberg"] = heisenberg_private_check(phi, code, rho_0, tol)
    return report, EXIT_OK


def cmd_search(args, tol):
    if not args.channel:
        raise InputError("--channel is required")
    if args.trials is None or args.trials < 1:
        raise InputError("--trials must be at least 1")
    if args.seed is None:
        raise InputError("--seed is required for a search")
    phi = _parse(channel_from_json, args.channel, "channel")
    dim = args.dim or 2
    if not 2 <= dim <= phi.dim_in:
        raise InputError(f"--dim must lie in [2, {phi.dim_in}]")
    code, best = search_private_subspace(phi, dim, args.trials, args.seed, workers=args.workers)
    report = {
        "dim": dim,
        "trials": args.trials,
        "seed": args.seed,
        "best_defect": best.defect,
        "best_trial": best.trial,
        "private_found": best.defect <= tol.absolute * dim ** 2,
        "best_subspace": matrix_to_json(code.embedding),
    }
    return report, EXIT_OK


def cmd_complement(args, tol):
    if not args.channel or not args.out:
        raise InputError("--channel and --out are required")
    phi = _parse(channel_from_json, args.channel, "channel")
    comp = complementary(phi)
    try:
        Path(args.out).write_text(json.dumps(channel_to_json(comp)))
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from None
    reread = channel_from_json(json.loads(Path(args.out).read_text()))
    twice = complementary(comp)
    report = {
        "out": str(args.out),
        "dim_in": comp.dim_in,
        "dim_out": comp.dim_out,
        "num_kraus": comp.num_kraus,
        "minimal_kraus": minimal_kraus(comp, tol).num_kraus,
        "round_trip": channels_equal(reread, complementary(phi), tol),
        "is_measurement": is_von_neumann_measurement(comp, tol),
        "complement_of_complement_equals_input": (
            twice.dim_out == phi.dim_out and channels_equal(twice, phi, tol)
        ),
    }
    return report, EXIT_OK


def cmd_kl_check(args, tol):
    phi, code = _channel_and_code(args)
    if code.dim_a == 1:
        ok, c = knill_laflamme_check(phi, code, tol)
        report = {"kind": "subspace", "correctable": ok, "coefficients": matrix_to_json(c)}
    else:
        ok = operator_knill_laflamme_check(phi, code, tol)
        report = {"kind": "subsystem", "correctable": ok}
    return report, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_pair_report(args, tol):
    phi, code = _channel_and_code(args)
    sigma_a = _load_sigma_a(args, code)
    rep = complementarity_pair_report(phi, code, sigma_a, tol)
    return rep.to_json(), EXIT_OK if rep.private_for_phi else EXIT_NEGATIVE


COMMANDS = {
    "demo": cmd_demo,
    "certify": cmd_certify,
    "complement": cmd_complement,
    "search": cmd_search,
    "kl-check": cmd_kl_check,
    "pair-report": cmd_pair_report,
}


def render_text(report, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for key, val in report.items():
        if key == "checks":
            for c in val:
                mark = "PASS" if c["ok"] else "FAIL"
                obs = "" if c["observed"] is None else f"  [{c['observed']}]"
                lines.append(f"{pad}{mark}  {c['check']}{obs}")
        elif isinstance(val, dict) and {"rows", "cols", "re"} <= set(val):
            m = matrix_from_json(val)
            lines.append(f"{pad}{key}:\n{_pauli_text(m)}")
        elif isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(val, indent + 1))
        else:
            lines.append(f"{pad}{key}: {val}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="privmap", description="Private quantum subsystem verification")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "demo":
            p.add_argument("name", help=f"one of {', '.join(DEMOS)}; n-qubit-dephasing(3) and depolarizing(4) forms accepted")
            p.add_argument("--qubits", type=int)
            p.add_argument("--samples", type=int, default=20)
        p.add_argument("--channel")
        p.add_argument("--code")
        p.add_argument("--sigma-a")
        p.add_argument("--mode", choices=("subspace", "subsystem", "operator"), default="subsystem")
        p.add_argument("--dim", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--tol", type=float)
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    tol = Tolerance(absolute=args.tol) if args.tol is not None else default_tolerance()
    try:
        report, code = COMMANDS[args.command](args, tol)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = json.dumps(report, indent=2) if args.format == "json" else render_text(report)
    if args.out and args.command != "complement":
        Path(args.out).write_text(json.dumps(report, indent=2))
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
