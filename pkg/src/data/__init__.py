"""
Datasets: types, on-disk formats, preprocessing and the synthetic generator.
"""
from .dataset import (
    EMOTION_ABBREVIATIONS,
    EMOTIONS,
    FEATURE_DIM,
    Dataset,
    EmotionLabel,
    FeatureSequence,
    LoadReport,
    MaskSpec,
    StandardizationStats,
    UnlabeledDataset,
)
from .io import load_dataset, read_dataset, resolve_manifest, write_dataset
from .preprocessing import (
    apply_standardization,
    compute_standardization,
    mask_batch,
    mask_sequence,
    maskable_sequences,
    sample_labeled_subset,
    split_and_standardize,
    split_train_val,
    standardize,
)
from .synthetic import SyntheticConfig, generate_synthetic, simulate_sequence, synthetic_coefficients

__all__ = [
    "EMOTIONS",
    "EMOTION_ABBREVIATIONS",
    "FEATURE_DIM",
    "Dataset",
    "EmotionLabel",
    "FeatureSequence",
    "LoadReport",
    "MaskSpec",
    "StandardizationStats",
    "UnlabeledDataset",
    "load_dataset",
    "read_dataset",
    "resolve_manifest",
    "write_dataset",
    "apply_standardization",
    "compute_standardization",
    "mask_batch",
    "mask_sequence",
    "maskable_sequences",
    "sample_labeled_subset",
    "split_and_standardize",
    "split_train_val",
    "standardize",
    "SyntheticConfig",
    "generate_synthetic",
    "simulate_sequence",
    "synthetic_coefficients",
]
