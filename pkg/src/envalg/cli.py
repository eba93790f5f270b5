"""Command-line interface.

Subcommands cover the individual pipeline stages (blocks, algebra,
right-action, split, classical-form, cpmap, stinespring, dipole), the full
pipeline (analyze), and the built-in example corpus (selfcheck).  Output is
a JSON document, printed to stdout or written atomically with --report.

Exit codes: 0 all checks passed, 1 a verification check failed,
2 malformed or invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

import numpy as np

from . import io as envio
from .analysis import AnalysisOptions, analyze_dipole, analyze_operator, run_analysis
from .channels import env_state_channel, env_state_channel_adjoint, fixed_space, singular_one_space
from .dipole import DipoleModel, dipole_classify
from .environment import (
    classical_quantum_split,
    commutative_form,
    env_blocks,
    environment_algebra,
)
from .errors import EnvalgError, OperatorFileError
from .linalg import BipartiteOperator, Tolerance, frob
from .rand import as_rng
from .right_action import (
    right_action_algebra,
    right_commutative_form,
    same_action,
    stinespring_minimal,
)
from .star_algebra import commutant, is_commutative, span_equal, structure_decomposition

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def _tol(args) -> Tolerance:
    return Tolerance(rank_rel=args.tol_rank, eq_abs=args.tol_eq)


def _emit(doc: dict, args) -> None:
    if getattr(args, "report", None):
        envio.write_report(doc, args.report)
    else:
        sys.stdout.write(envio.dump_report(doc))


def _load(args, tol: Tolerance):
    obj = envio.parse_operator(args.input, tol)
    meta = {
        "path": args.input,
        "sha256": envio.file_checksum(args.input),
    }
    return obj, meta


def _require_operator(obj) -> BipartiteOperator:
    if isinstance(obj, DipoleModel):
        return obj.assemble()
    return obj


def _parse_psi(spec: str, env_dim: int) -> tuple[str, np.ndarray]:
    """--psi accepts a basis index or a path to a JSON file with a
    "vector" field of [re, im] pairs."""
    if spec.isdigit():
        idx = int(spec)
        if idx >= env_dim:
            raise OperatorFileError(f"psi index {idx} out of range for env_dim {env_dim}")
        v = np.zeros(env_dim, dtype=complex)
        v[idx] = 1.0
        return f"e{idx}", v
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        v = np.asarray([complex(a, b) for a, b in doc["vector"]])
    except (OSError, KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise OperatorFileError(f"cannot read psi from {spec}: {exc}") from exc
    n = np.linalg.norm(v)
    if n == 0 or v.size != env_dim:
        raise OperatorFileError(f"psi from {spec} has wrong size or is zero")
    return spec, v / n


# ----------------------------------------------------------------------
# Subcommand bodies
# ----------------------------------------------------------------------


def cmd_analyze(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    probes = []
    target = _require_operator(obj)
    for spec in args.psi or []:
        probes.append(_parse_psi(spec, target.env_dim))
    options = AnalysisOptions(
        tol=tol, seed=args.seed, psi_probes=probes, entropy_samples=args.entropy_samples
    )
    report = run_analysis(obj, options)
    report["input"].update(meta)
    _emit(report, args)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_blocks(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    op = _require_operator(obj)
    fam = env_blocks(op)
    doc = {
        "input": meta,
        "sys_dim": op.sys_dim,
        "env_dim": op.env_dim,
        "blocks": [
            [envio.encode_matrix(fam.blocks[i, j]) for j in range(op.sys_dim)]
            for i in range(op.sys_dim)
        ],
        "reconstruction_residual": frob(fam.reconstruct() - op.matrix),
    }
    _emit(doc, args)
    return EXIT_OK


def _algebra_doc(alg, sd) -> dict:
    return {
        "dim": alg.dim,
        "commutative": bool(is_commutative(alg)),
        "basis": [envio.encode_matrix(b) for b in alg.basis],
        "blocks": [
            {"factor_dim": b.factor_dim, "multiplicity": b.multiplicity, "rank": b.rank}
            for b in sd.blocks
        ],
    }


def cmd_algebra(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    op = _require_operator(obj)
    alg = environment_algebra(op, tol)
    sd = structure_decomposition(alg, tol, as_rng(args.seed))
    doc = {"input": meta, "environment_algebra": _algebra_doc(alg, sd)}
    doc["environment_algebra"]["commutant_dim"] = commutant(alg, tol).dim
    _emit(doc, args)
    return EXIT_OK


def cmd_right_action(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    op = _require_operator(obj)
    ra = right_action_algebra(op, tol)
    sd = structure_decomposition(ra.algebra, tol, as_rng(args.seed))
    doc = {"input": meta, "right_action_algebra": _algebra_doc(ra.algebra, sd)}
    doc["right_action_algebra"]["generator_count"] = ra.generator_count
    _emit(doc, args)
    return EXIT_OK


def cmd_split(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    op = _require_operator(obj)
    split = classical_quantum_split(op, tol, as_rng(args.seed))
    doc = {
        "input": meta,
        "classical_dim": split.classical_dim,
        "quantum_dim": split.quantum_dim,
        "projection": envio.encode_matrix(split.projection),
        "classical_basis": [envio.encode_vector(v) for v in split.classical_basis.T],
        "quantum_basis": [envio.encode_vector(v) for v in split.quantum_basis.T],
        "invariance_residual": split.invariance_residual,
    }
    _emit(doc, args)
    return EXIT_OK


def cmd_classical_form(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    op = _require_operator(obj)
    rng = as_rng(args.seed)
    if args.right:
        form = right_commutative_form(op, tol, rng)
    else:
        form = commutative_form(op, tol, rng)
    doc = {
        "input": meta,
        "right_action": bool(args.right),
        "unitaries": [envio.encode_matrix(u) for u in form.unitaries],
        "psi": [envio.encode_vector(v) for v in form.psi],
        "reconstruction_residual": frob(form.reconstruct() - op.matrix),
    }
    if form.phi is not None:
        doc["phi"] = [envio.encode_vector(v) for v in form.phi]
    _emit(doc, args)
    return EXIT_OK


def cmd_cpmap(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    op = _require_operator(obj)
    lchan = env_state_channel(op, tol)
    lstar = env_state_channel_adjoint(op, tol)
    fs = fixed_space(op, tol, check=False)
    ss = singular_one_space(op, tol, check=False)
    env_comm = commutant(environment_algebra(op, tol), tol)
    ra_comm = commutant(right_action_algebra(op, tol, check=False).algebra, tol)
    _, res_fixed = span_equal(fs, env_comm)
    _, res_sing = span_equal(ss, ra_comm)
    doc = {
        "input": meta,
        "channel": envio.encode_matrix(lchan.matrix),
        "adjoint_channel": envio.encode_matrix(lstar.matrix),
        "fixed_space_dim": fs.dim,
        "singular_space_dim": ss.dim,
        "fixed_vs_commutant_residual": res_fixed,
        "singular_vs_right_commutant_residual": res_sing,
    }
    _emit(doc, args)
    ok = res_fixed <= 1e-8 and res_sing <= 1e-8
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_stinespring(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    op = _require_operator(obj)
    rows = []
    for spec in args.psi:
        label, v = _parse_psi(spec, op.env_dim)
        wit = stinespring_minimal(op, v, tol)
        rows.append(
            {
                "psi": label,
                "minimal": wit.minimal,
                "cyclic": wit.cyclic,
                "span_rank": wit.span_rank,
            }
        )
    _emit({"input": meta, "probes": rows}, args)
    return EXIT_OK


def cmd_dipole(args) -> int:
    tol = _tol(args)
    obj, meta = _load(args, tol)
    if not isinstance(obj, DipoleModel):
        raise OperatorFileError("dipole subcommand requires a file of kind 'dipole'")
    report = analyze_dipole(obj, AnalysisOptions(tol=tol, seed=args.seed))
    report["input"].update(meta)
    _emit(report, args)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


# ----------------------------------------------------------------------
# Built-in corpus self-check
# ----------------------------------------------------------------------

SELFCHECK_EXPECTATIONS = {
    "excitation_exchange_pi6.json": {"alg_dim": 4, "commutant_dim": 1, "right_dim": 4, "classical_dim": 0},
    "excitation_exchange_pi3.json": {"alg_dim": 4, "commutant_dim": 1, "right_dim": 4, "classical_dim": 0},
    "excitation_exchange_pi2.json": {"alg_dim": 4, "commutant_dim": 1, "right_dim": 4, "classical_dim": 0},
    "classical_quantum_mix.json": {"alg_dim": 6, "classical_dim": 2, "quantum_dim": 2},
    "swap_action_u.json": {"alg_dim": 4, "right_dim": 2, "right_commutative": True},
    "swap_action_v.json": {"alg_dim": 2, "right_dim": 2, "right_commutative": True},
    "dipole_single_x.json": {"dipole_case": "commutative", "theta": 0.0},
    "dipole_x_z.json": {"dipole_case": "block-split", "alg_dim": 9},
}


def _selfcheck_one(name: str, expect: dict, tol: Tolerance, seed: int) -> tuple[bool, dict]:
    text = resources.files("envalg.data").joinpath(name).read_text(encoding="utf-8")
    obj = envio.parse_operator_dict(json.loads(text), tol)
    options = AnalysisOptions(tol=tol, seed=seed)
    report = run_analysis(obj, options)
    failures = []
    if not report["passed"]:
        failures.append("pipeline checks failed")
    ea = report.get("environment_algebra", {})
    if "alg_dim" in expect and ea.get("dim") != expect["alg_dim"]:
        failures.append(f"environment algebra dim {ea.get('dim')} != {expect['alg_dim']}")
    if "commutant_dim" in expect and ea.get("commutant_dim") != expect["commutant_dim"]:
        failures.append(f"commutant dim {ea.get('commutant_dim')} != {expect['commutant_dim']}")
    ra = report.get("right_action_algebra", {})
    if "right_dim" in expect and ra.get("dim") != expect["right_dim"]:
        failures.append(f"right-action dim {ra.get('dim')} != {expect['right_dim']}")
    if expect.get("right_commutative") and not ra.get("commutative"):
        failures.append("right-action algebra not commutative")
    sp = report.get("split", {})
    if "classical_dim" in expect and sp.get("classical_dim") != expect["classical_dim"]:
        failures.append(f"classical dim {sp.get('classical_dim')} != {expect['classical_dim']}")
    if "quantum_dim" in expect and sp.get("quantum_dim") != expect["quantum_dim"]:
        failures.append(f"quantum dim {sp.get('quantum_dim')} != {expect['quantum_dim']}")
    dp = report.get("dipole", {})
    if "dipole_case" in expect and dp.get("case") != expect["dipole_case"]:
        failures.append(f"dipole case {dp.get('case')} != {expect['dipole_case']}")
    if "theta" in expect and abs(dp.get("theta", 1e9) - expect["theta"]) > 1e-9:
        failures.append(f"theta {dp.get('theta')} != {expect['theta']}")
    return not failures, {"name": name, "failures": failures, "report": report}


def cmd_selfcheck(args) -> int:
    tol = _tol(args)
    results = []
    all_ok = True
    for name, expect in SELFCHECK_EXPECTATIONS.items():
        ok, detail = _selfcheck_one(name, expect, tol, args.seed)
        all_ok = all_ok and ok
        status = "PASS" if ok else "FAIL"
        line = f"{status} {name}"
        if not ok:
            line += ": " + "; ".join(detail["failures"])
        print(line)
        results.append(detail)
    if getattr(args, "report", None):
        envio.write_report(
            {"results": [{k: v for k, v in r.items() if k != "report"} for r in results]},
            args.report,
        )
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


# ----------------------------------------------------------------------
# Argument parsing
# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="envalg",
        description="Operator-algebra analysis of bipartite unitaries and Hamiltonians",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("input", help="operator file (JSON)")
        p.add_argument("--tol-rank", type=float, default=1e-10, help="relative rank threshold")
        p.add_argument("--tol-eq", type=float, default=1e-9, help="absolute equality threshold")
        p.add_argument("--seed", type=int, default=0, help="seed for generic-element draws")
        p.add_argument("--report", help="write the JSON output to this path (atomic)")

    p = sub.add_parser("analyze", help="full pipeline")
    common(p)
    p.add_argument("--psi", action="append", help="dilation probe: basis index or vector file")
    p.add_argument("--entropy-samples", type=int, default=0, help="random entropy-production probes")
    p.set_defaults(func=cmd_analyze)

    for name, fn, extra in [
        ("blocks", cmd_blocks, None),
        ("algebra", cmd_algebra, None),
        ("right-action", cmd_right_action, None),
        ("split", cmd_split, None),
        ("classical-form", cmd_classical_form, "right"),
        ("cpmap", cmd_cpmap, None),
        ("dipole", cmd_dipole, None),
    ]:
        p = sub.add_parser(name)
        common(p)
        if extra == "right":
            p.add_argument("--right", action="store_true", help="two-basis form from the right-action algebra")
        p.set_defaults(func=fn)

    p = sub.add_parser("stinespring", help="dilation minimality / cyclicity probes")
    common(p)
    p.add_argument("--psi", action="append", required=True, help="basis index or vector file")
    p.set_defaults(func=cmd_stinespring)

    p = sub.add_parser("selfcheck", help="run the built-in example corpus")
    common(p, needs_input=False)
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OperatorFileError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except EnvalgError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
