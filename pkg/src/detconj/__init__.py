"""Exact determinant toolkit for the M(d) matrix family."""

from .campaign import (
    CampaignConfig,
    CampaignReport,
    Record,
    conjectured_value,
    export_bfile,
    read_bfile,
    run_campaign,
    verify_one,
)
from .engines import (
    Certification,
    CrtMode,
    DetResult,
    Engine,
    SplitForm,
    det_bareiss,
    det_crt,
    det_laplace,
    det_mod_p,
    det_structural,
    hadamard_bound,
    split_pq,
    structural_sweep,
)
from .errors import (
    CheckpointCorruption,
    DetConjError,
    DimensionTooLarge,
    EngineDisagreement,
    StructuralMismatch,
)
from .explore import CofactorProfile, cofactor_profile, principal_minors
from .matrix import (
    DenseMatrix,
    EntryAddress,
    SparseColMatrix,
    build_m,
    entry,
    to_dense,
)

__version__ = "0.1.0"
