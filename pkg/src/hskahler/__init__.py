"""Invariant Hermitian geometry on real Lie algebras: closed-completion
feasibility, block identities of 2-step solvable structures, and the
constructive step from a closed completion to an invariant Kahler
metric, plus the explicit model family realizing all of it.
"""

from .algebra import (
    CheckResult,
    CompatibleMetric,
    ComplexStructure,
    Frame,
    RealLieAlgebra,
    SolvableProfile,
    StructureConstants,
    canonical_frame,
    change_frame,
    compatibility_residual,
    complexify_and_extract,
    derived_subalgebra,
    integrability_residual,
    realify,
    reconstruction_residual,
    solvable_profile,
    unimodularity_check,
)
from .analysis import (
    AnalysisReport,
    Record,
    run_analysis,
    run_hs,
    run_kahlerize,
    run_verify_claims,
)
from .config import Config, DEFAULT_CONFIG, TOOL_VERSION
from .documents import AlgebraDocument, load, loads
from .errors import (
    CertificationError,
    ClaimViolation,
    DimensionError,
    FormatError,
    GeometryError,
    ParameterError,
    PreconditionError,
    RankError,
    StructureError,
    ValidationError,
)
from .forms import (
    InvariantForm,
    dd_residual,
    del_and_delbar,
    hermitian_coefficients,
    positivity_11,
    type_split,
)
from .kahler import (
    ClaimsRecord,
    FamilyInstance,
    KahlerCertificate,
    claims_pipeline,
    generate_family,
    kahlerize,
    simultaneous_diagonalize,
)
from .metrics import (
    FrameMetric,
    HSSearchResult,
    HSSolution,
    balanced_check,
    chern_torsion,
    chern_torsion_unitary,
    frame_metric_from_real,
    hs_decide,
    hs_form,
    hs_metric_search,
    hs_residual_of,
    kahler_check,
    kahler_form,
    pluriclosed_check,
)
from .solvable import (
    AdmissibleDecomposition,
    BlockData,
    admissible_from_frame,
    build_admissible_frame,
    extract_blocks,
    verify_bianchi_blocks,
    verify_hs_blocks,
    verify_restrictions,
)

__version__ = TOOL_VERSION

__all__ = [
    "AdmissibleDecomposition",
    "AlgebraDocument",
    "AnalysisReport",
    "BlockData",
    "CertificationError",
    "CheckResult",
    "ClaimViolation",
    "ClaimsRecord",
    "CompatibleMetric",
    "ComplexStructure",
    "Config",
    "DEFAULT_CONFIG",
    "DimensionError",
    "FamilyInstance",
    "FormatError",
    "Frame",
    "FrameMetric",
    "GeometryError",
    "HSSearchResult",
    "HSSolution",
    "InvariantForm",
    "KahlerCertificate",
    "ParameterError",
    "PreconditionError",
    "RankError",
    "RealLieAlgebra",
    "Record",
    "SolvableProfile",
    "StructureConstants",
    "StructureError",
    "TOOL_VERSION",
    "ValidationError",
    "admissible_from_frame",
    "balanced_check",
    "build_admissible_frame",
    "canonical_frame",
    "change_frame",
    "chern_torsion",
    "chern_torsion_unitary",
    "claims_pipeline",
    "compatibility_residual",
    "complexify_and_extract",
    "dd_residual",
    "del_and_delbar",
    "derived_subalgebra",
    "extract_blocks",
    "frame_metric_from_real",
    "generate_family",
    "hermitian_coefficients",
    "hs_decide",
    "hs_form",
    "hs_metric_search",
    "hs_residual_of",
    "integrability_residual",
    "kahler_check",
    "kahler_form",
    "kahlerize",
    "load",
    "loads",
    "pluriclosed_check",
    "positivity_11",
    "realify",
    "reconstruction_residual",
    "run_analysis",
    "run_hs",
    "run_kahlerize",
    "run_verify_claims",
    "simultaneous_diagonalize",
    "solvable_profile",
    "type_split",
    "unimodularity_check",
    "verify_bianchi_blocks",
    "verify_hs_blocks",
    "verify_restrictions",
    "__version__",
]
