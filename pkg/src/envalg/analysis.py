"""Full-pipeline analysis of one operator, aggregated into a report dict.

The report carries every computed dimension and basis, a residual for every
numeric claim, and a checks table with one pass/fail row per verified
property.  All randomness is drawn from one seeded generator, so a report
is a deterministic function of (input, tolerances, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import io as envio
from .channels import entropy_check, fixed_space, singular_one_space
from .dipole import DipoleModel, dipole_classify
from .environment import (
    classical_quantum_split,
    commutative_form,
    env_blocks,
    environment_algebra,
    environment_commutant_direct,
)
from .errors import EnvalgError
from .linalg import BipartiteOperator, Tolerance, frob, resolve_tol
from .rand import as_rng, random_density
from .right_action import (
    right_action_algebra,
    right_action_commutant_direct,
    right_commutative_form,
    same_action_representative,
    stinespring_minimal,
)
from .star_algebra import commutant, is_commutative, span_equal, span_residual, structure_decomposition


@dataclass
class AnalysisOptions:
    tol: Tolerance = None
    seed: int = 0
    psi_probes: list = field(default_factory=list)  # (label, vector) pairs
    entropy_samples: int = 0

    def __post_init__(self):
        self.tol = resolve_tol(self.tol)


def _check(checks: list, name: str, residual: float, threshold: float) -> bool:
    ok = bool(residual <= threshold)
    checks.append(
        {"name": name, "residual": float(residual), "threshold": float(threshold), "passed": ok}
    )
    return ok


def _fail(checks: list, name: str, message: str) -> None:
    checks.append({"name": name, "error": message, "passed": False})


def _algebra_section(alg, sd=None) -> dict:
    out = {"dim": alg.dim, "commutative": bool(is_commutative(alg))}
    if sd is not None:
        out["blocks"] = [
            {"factor_dim": b.factor_dim, "multiplicity": b.multiplicity, "rank": b.rank}
            for b in sd.blocks
        ]
    return out


def _form_section(form) -> dict:
    out = {
        "unitaries": [envio.encode_matrix(u) for u in form.unitaries],
        "psi": [envio.encode_vector(v) for v in form.psi],
    }
    if form.phi is not None:
        out["phi"] = [envio.encode_vector(v) for v in form.phi]
    return out


def analyze_operator(op: BipartiteOperator, options: AnalysisOptions | None = None) -> dict:
    """Run the applicable pipeline on a validated operator.

    Unitary inputs get the full treatment (both algebras, split, normal
    forms, spectral cross-checks, optional dilation probes and entropy
    sampling); hermitian inputs get the environment-algebra side with
    hermitian restrictions.
    """
    options = options or AnalysisOptions()
    tol = options.tol
    rng = as_rng(options.seed)
    checks: list = []
    report: dict = {
        "schema_version": envio.SCHEMA_VERSION,
        "input": {"kind": op.kind, "sys_dim": op.sys_dim, "env_dim": op.env_dim},
        "tolerances": {"rank_rel": tol.rank_rel, "eq_abs": tol.eq_abs},
        "seed": options.seed,
        "checks": checks,
    }

    fam = env_blocks(op)
    _check(checks, "block_reconstruction", frob(fam.reconstruct() - op.matrix), 1e-9)

    env_alg = environment_algebra(op, tol)
    sd = structure_decomposition(env_alg, tol, rng)
    report["environment_algebra"] = _algebra_section(env_alg, sd)

    env_comm = commutant(env_alg, tol)
    report["environment_algebra"]["commutant_dim"] = env_comm.dim
    try:
        direct = environment_commutant_direct(op, tol, check=False)
        _, res = span_equal(direct, env_comm)
        _check(checks, "commutant_direct_vs_algebra", res, 1e-8)
    except EnvalgError as exc:
        _fail(checks, "commutant_direct_vs_algebra", str(exc))

    # classical / quantum split
    try:
        split = classical_quantum_split(op, tol, rng)
        report["split"] = {
            "classical_dim": split.classical_dim,
            "quantum_dim": split.quantum_dim,
            "classical_basis": [envio.encode_vector(v) for v in split.classical_basis.T],
            "quantum_basis": [envio.encode_vector(v) for v in split.quantum_basis.T],
        }
        _check(checks, "split_invariance", split.invariance_residual, 1e-9)
        if split.classical_part is not None:
            cf = commutative_form(split.classical_part, tol, rng)
            report["split"]["classical_form"] = _form_section(cf)
            _check(
                checks,
                "classical_part_form_reconstruction",
                frob(cf.reconstruct() - split.classical_part.matrix),
                1e-9,
            )
    except EnvalgError as exc:
        _fail(checks, "split", str(exc))

    if bool(is_commutative(env_alg, tol)):
        try:
            form = commutative_form(op, tol, rng)
            report["classical_form"] = _form_section(form)
            _check(
                checks, "classical_form_reconstruction", frob(form.reconstruct() - op.matrix), 1e-9
            )
        except EnvalgError as exc:
            _fail(checks, "classical_form", str(exc))

    if op.kind != "unitary":
        report["passed"] = all(c["passed"] for c in checks)
        return report

    # unitary-only sections -------------------------------------------------
    ra = right_action_algebra(op, tol, check=False)
    ra_sd = structure_decomposition(ra.algebra, tol, rng)
    report["right_action_algebra"] = _algebra_section(ra.algebra, ra_sd)
    report["right_action_algebra"]["generator_count"] = ra.generator_count
    _check(checks, "right_action_inside_environment", span_residual(ra.algebra, env_alg), 1e-8)

    ra_comm = commutant(ra.algebra, tol)
    report["right_action_algebra"]["commutant_dim"] = ra_comm.dim
    try:
        ra_direct = right_action_commutant_direct(op, tol, check=False)
        _, res = span_equal(ra_direct, ra_comm)
        _check(checks, "right_commutant_direct_vs_algebra", res, 1e-8)
    except EnvalgError as exc:
        _fail(checks, "right_commutant_direct_vs_algebra", str(exc))

    # spectral characterization
    try:
        fs = fixed_space(op, tol, check=False)
        _, res = span_equal(fs, env_comm)
        report["spectral"] = {"fixed_space_dim": fs.dim, "fixed_vs_commutant_residual": res}
        _check(checks, "fixed_space_equals_commutant", res, 1e-8)
        ss = singular_one_space(op, tol, check=False)
        _, res2 = span_equal(ss, ra_comm)
        report["spectral"]["singular_space_dim"] = ss.dim
        report["spectral"]["singular_vs_right_commutant_residual"] = res2
        _check(checks, "singular_space_equals_right_commutant", res2, 1e-8)
    except EnvalgError as exc:
        _fail(checks, "spectral", str(exc))

    # same-action representative and two-basis form
    try:
        wit = same_action_representative(op, tol, rng)
        report["representative"] = {
            "same_action_residual": wit.same_action_residual,
            "algebra_residual": wit.algebra_residual,
            "env_unitary": envio.encode_matrix(wit.env_unitary),
            "block_reports": [dict(r) for r in wit.block_reports],
        }
        _check(checks, "representative_same_action", wit.same_action_residual, 1e-8)
        _check(checks, "representative_algebra_match", wit.algebra_residual, 1e-8)
    except EnvalgError as exc:
        _fail(checks, "representative", str(exc))
        report["representative"] = {
            "error": str(exc),
            "block_reports": [dict(r) for r in getattr(exc, "block_reports", [])],
        }

    if bool(is_commutative(ra.algebra, tol)):
        try:
            rform = right_commutative_form(op, tol, rng)
            report["right_classical_form"] = _form_section(rform)
            _check(
                checks,
                "right_form_reconstruction",
                frob(rform.reconstruct() - op.matrix),
                1e-9,
            )
        except EnvalgError as exc:
            _fail(checks, "right_classical_form", str(exc))

    # optional dilation probes
    if options.psi_probes:
        rows = []
        for label, psi in options.psi_probes:
            try:
                wit = stinespring_minimal(op, psi, tol)
                rows.append(
                    {
                        "psi": label,
                        "minimal": wit.minimal,
                        "cyclic": wit.cyclic,
                        "span_rank": wit.span_rank,
                    }
                )
                if wit.minimal and not wit.cyclic:
                    _fail(checks, f"stinespring_{label}", "minimal but not cyclic")
            except EnvalgError as exc:
                _fail(checks, f"stinespring_{label}", str(exc))
        report["stinespring"] = rows

    # optional entropy sampling
    if options.entropy_samples > 0:
        try:
            slacks = []
            for _ in range(options.entropy_samples):
                omega = random_density(op.env_dim, rng)
                rec = entropy_check(op, omega)
                slacks.append(rec.entropy_after - rec.entropy_before)
            report["entropy"] = {
                "samples": options.entropy_samples,
                "min_gain": float(min(slacks)),
                "max_gain": float(max(slacks)),
            }
            _check(checks, "entropy_monotone", max(0.0, -min(slacks)), 1e-10)
        except EnvalgError as exc:
            _fail(checks, "entropy", str(exc))

    report["passed"] = all(c["passed"] for c in checks)
    return report


def analyze_dipole(model: DipoleModel, options: AnalysisOptions | None = None) -> dict:
    """Classification plus the hermitian pipeline on the assembled model."""
    options = options or AnalysisOptions()
    tol = options.tol
    op = model.assemble(tol)
    report = analyze_operator(op, options)
    checks = report["checks"]
    try:
        result = dipole_classify(model, tol, as_rng(options.seed))
        section = {
            "case": result.case,
            "reduced_rank": result.reduced_rank,
        }
        if result.case == "commutative":
            section["theta"] = result.theta
            section["amplitudes"] = envio.encode_vector(result.amplitudes)
            _check(checks, "dipole_normal_form", result.normal_form_residual, 1e-8)
        else:
            section["k1_basis"] = [envio.encode_vector(v) for v in result.k1_basis.T]
            section["k2_basis"] = [envio.encode_vector(v) for v in result.k2_basis.T]
            _check(checks, "dipole_algebra_match", result.algebra_residual, 1e-8)
        report["dipole"] = section
    except EnvalgError as exc:
        _fail(checks, "dipole_classification", str(exc))
    report["passed"] = all(c["passed"] for c in checks)
    return report


def run_analysis(obj, options: AnalysisOptions | None = None) -> dict:
    """Dispatch on the parsed input type."""
    if isinstance(obj, DipoleModel):
        return analyze_dipole(obj, options)
    if isinstance(obj, BipartiteOperator):
        return analyze_operator(obj, options)
    raise TypeError(f"cannot analyze {type(obj)!r}")
