"""Differential-fuzzing ground truth and surface-bias audits for code
evaluation metrics."""

__version__ = "0.1.0"

from semdiff.harness import HarnessConfig, PairScore, canonical_equal, score_pair
from semdiff.model import (
    CodePairRecord,
    Dataset,
    RegionThresholds,
    TaskSpec,
    VariantRecord,
    load_dataset,
    save_dataset,
    validate_record,
)
from semdiff.surface import ast_similarity, edit_similarity, surface_sim

__all__ = [
    "CodePairRecord",
    "Dataset",
    "HarnessConfig",
    "PairScore",
    "RegionThresholds",
    "TaskSpec",
    "VariantRecord",
    "__version__",
    "ast_similarity",
    "canonical_equal",
    "edit_similarity",
    "load_dataset",
    "save_dataset",
    "score_pair",
    "surface_sim",
    "validate_record",
]
