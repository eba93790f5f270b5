"""Numerical operator algebras attached to a bipartite unitary or
Hamiltonian: the environment algebra and its commutant, the classical /
quantum decomposition of the environment, the right-action algebra with
its same-action normal forms, and the spectral characterization of both
algebras through a doubly stochastic channel."""

from .analysis import AnalysisOptions, analyze_dipole, analyze_operator, run_analysis
from .channels import (
    EntropyCheck,
    Superoperator,
    entropy,
    entropy_check,
    env_state_channel,
    env_state_channel_adjoint,
    fixed_space,
    heisenberg_channel,
    shannon_entropy,
    singular_one_space,
)
from .dipole import (
    ClassificationResult,
    DipoleModel,
    dipole_classify,
    dipole_reduce,
    transform_couplings,
)
from .environment import (
    BlockFamily,
    ClassicalForm,
    EnvironmentSplit,
    classical_quantum_split,
    commutative_form,
    env_blocks,
    environment_algebra,
    environment_commutant_direct,
)
from .errors import (
    ConstructionError,
    CrossCheckError,
    EnvalgError,
    NumericalRankError,
    OperatorFileError,
)
from .io import parse_operator, write_report
from .linalg import (
    BipartiteOperator,
    Tolerance,
    bipartite_operator,
    eig_hermitian,
    hs_orthonormalize,
    kron,
    nullspace,
    partial_trace_env,
    partial_trace_sys,
    partial_trace_weighted,
    svd,
)
from .right_action import (
    ActionEquivalenceWitness,
    RightActionAlgebra,
    StinespringWitness,
    cyclic_vector,
    right_action_algebra,
    right_action_commutant_direct,
    right_commutative_form,
    same_action,
    same_action_representative,
    stinespring_minimal,
)
from .star_algebra import (
    FactorBlock,
    StarAlgebra,
    StructureDecomposition,
    bicommutant_check,
    center,
    commutant,
    full_algebra,
    generate_algebra,
    is_commutative,
    max_commutative_projection,
    span_equal,
    span_residual,
    structure_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisOptions",
    "ActionEquivalenceWitness",
    "BipartiteOperator",
    "BlockFamily",
    "ClassicalForm",
    "ClassificationResult",
    "ConstructionError",
    "CrossCheckError",
    "DipoleModel",
    "EntropyCheck",
    "EnvalgError",
    "EnvironmentSplit",
    "FactorBlock",
    "NumericalRankError",
    "OperatorFileError",
    "RightActionAlgebra",
    "StarAlgebra",
    "StinespringWitness",
    "StructureDecomposition",
    "Superoperator",
    "Tolerance",
    "analyze_dipole",
    "analyze_operator",
    "bicommutant_check",
    "bipartite_operator",
    "center",
    "classical_quantum_split",
    "commutant",
    "commutative_form",
    "cyclic_vector",
    "dipole_classify",
    "dipole_reduce",
    "eig_hermitian",
    "entropy",
    "entropy_check",
    "env_blocks",
    "env_state_channel",
    "env_state_channel_adjoint",
    "environment_algebra",
    "environment_commutant_direct",
    "fixed_space",
    "full_algebra",
    "generate_algebra",
    "heisenberg_channel",
    "hs_orthonormalize",
    "is_commutative",
    "kron",
    "max_commutative_projection",
    "nullspace",
    "parse_operator",
    "partial_trace_env",
    "partial_trace_sys",
    "partial_trace_weighted",
    "right_action_algebra",
    "right_action_commutant_direct",
    "right_commutative_form",
    "run_analysis",
    "same_action",
    "same_action_representative",
    "shannon_entropy",
    "singular_one_space",
    "span_equal",
    "span_residual",
    "stinespring_minimal",
    "structure_decomposition",
    "svd",
    "transform_couplings",
    "write_report",
]
