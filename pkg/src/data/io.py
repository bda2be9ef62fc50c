"""
On-disk dataset formats.

    manifest.txt   one record per line: <id>,<relative feature file>,<T>
    *.fsq          "FSQ1" | T u32 | D u32 | T·D little-endian f32, row-major
    labels.csv     id,happy,sad,anger,surprise,disgust,fear
"""
import struct
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..errors import FormatError, IngestionError
from ..utils.logging import get_logger
from .dataset import EMOTIONS, FEATURE_DIM, Dataset, EmotionLabel, FeatureSequence, LoadReport

logger = get_logger("data.io")

FEATURE_MAGIC = b"FSQ1"
MANIFEST_NAME = "manifest.txt"
LABELS_NAME = "labels.csv"
FEATURES_DIRNAME = "features"
LABEL_COLUMNS = ["id", *EMOTIONS]

_FEATURE_HEADER = struct.Struct("<4sII")
_F32 = np.dtype("<f4")

PathLike = Union[str, Path]


def encode_features(features: np.ndarray) -> bytes:
    features = np.asarray(features)
    if features.ndim != 2:
        raise IngestionError(f"features must be [T×D], got shape {features.shape}")
    t, d = features.shape
    return _FEATURE_HEADER.pack(FEATURE_MAGIC, t, d) + np.ascontiguousarray(features, dtype=_F32).tobytes()


def write_feature_file(path: PathLike, features: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_features(features))


def read_feature_file(path: PathLike, sample_id: str = "", feature_dim: int = FEATURE_DIM) -> np.ndarray:
    """Decode one feature file into a float64 [T×D] array."""
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"sample {sample_id!r}: feature file not found: {path}")
    payload = path.read_bytes()
    if len(payload) < _FEATURE_HEADER.size:
        raise FormatError(f"sample {sample_id!r}: truncated header in {path}", expected=_FEATURE_HEADER.size, found=len(payload))
    magic, t, d = _FEATURE_HEADER.unpack_from(payload)
    if magic != FEATURE_MAGIC:
        raise FormatError(f"sample {sample_id!r}: bad feature magic in {path}", expected=FEATURE_MAGIC, found=magic)
    if d != feature_dim:
        raise IngestionError(f"sample {sample_id!r}: expected {feature_dim} feature columns, found {d}")
    expected = _FEATURE_HEADER.size + t * d * _F32.itemsize
    if len(payload) != expected:
        raise FormatError(f"sample {sample_id!r}: feature payload size in {path}", expected=expected, found=len(payload))
    values = np.frombuffer(payload, dtype=_F32, offset=_FEATURE_HEADER.size, count=t * d)
    return values.reshape(t, d).astype(np.float64)


def read_manifest(manifest_path: PathLike) -> pd.DataFrame:
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise IngestionError(f"manifest not found: {manifest_path}")
    try:
        frame = pd.read_csv(
            manifest_path,
            header=None,
            names=["id", "path", "T"],
            dtype={"id": str, "path": str},
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except (pd.errors.ParserError, ValueError) as exc:
        raise IngestionError(f"malformed manifest {manifest_path}: {exc}") from exc
    if frame[["id", "path", "T"]].isna().any().any():
        raise IngestionError(f"manifest {manifest_path} has incomplete records")
    return frame


def _declared_length(value, sample_id: str) -> int:
    try:
        length = float(value)
    except (TypeError, ValueError):
        raise IngestionError(f"sample {sample_id!r}: manifest length {value!r} is not an integer") from None
    if not length.is_integer() or length < 1:
        raise IngestionError(f"sample {sample_id!r}: manifest length {value!r} is not a positive integer")
    return int(length)


def read_labels(labels_path: PathLike) -> Dict[str, EmotionLabel]:
    labels_path = Path(labels_path)
    if not labels_path.is_file():
        raise IngestionError(f"labels file not found: {labels_path}")
    frame = pd.read_csv(labels_path, dtype={"id": str}, encoding="utf-8")
    if list(frame.columns) != LABEL_COLUMNS:
        raise IngestionError(f"labels header must be {','.join(LABEL_COLUMNS)}, got {','.join(map(str, frame.columns))}")

    labels: Dict[str, EmotionLabel] = {}
    for row in frame.itertuples(index=False):
        sample_id = str(row[0])
        if sample_id in labels:
            raise IngestionError(f"duplicate label row for sample {sample_id!r}")
        try:
            labels[sample_id] = EmotionLabel(np.asarray(row[1:], dtype=np.float64))
        except IngestionError as exc:
            raise IngestionError(f"sample {sample_id!r}: {exc}") from exc
    return labels


def read_dataset(
    manifest_path: PathLike,
    labels_path: Optional[PathLike] = None,
    feature_dim: int = FEATURE_DIM,
) -> Tuple[Dataset, LoadReport]:
    """
    Ingest a manifest, its feature files and (optionally) a labels CSV.

    Non-finite feature values are replaced by 0.0 and counted in the report.
    When `labels_path` is omitted, `labels.csv` next to the manifest is used
    if it exists; a dataset without labels is valid (pretraining needs none).
    """
    manifest_path = Path(manifest_path)
    frame = read_manifest(manifest_path)
    root = manifest_path.parent
    report = LoadReport()

    sequences = []
    seen = set()
    for record in frame.itertuples(index=False):
        sample_id = str(record.id)
        if sample_id in seen:
            raise IngestionError(f"duplicate sample id {sample_id!r} in {manifest_path}")
        seen.add(sample_id)

        declared = _declared_length(record.T, sample_id)
        features = read_feature_file(root / record.path, sample_id, feature_dim)
        if features.shape[0] != declared:
            raise IngestionError(f"sample {sample_id!r}: manifest says T={declared}, file has T={features.shape[0]}")
        bad = ~np.isfinite(features)
        if bad.any():
            features[bad] = 0.0
            report.repaired_values += int(bad.sum())
            report.repaired_samples.append(sample_id)
        sequences.append(FeatureSequence(sample_id, features))

    if labels_path is None and (root / LABELS_NAME).is_file():
        labels_path = root / LABELS_NAME
    labels = read_labels(labels_path) if labels_path is not None else {}

    unknown = sorted(set(labels) - seen)
    if unknown:
        raise IngestionError(f"labels refer to samples missing from the manifest: {unknown[:5]}")

    dataset = Dataset(tuple(sequences), labels)
    report.samples = len(dataset)
    report.labeled = len(labels)
    logger.info(
        "dataset_loaded",
        manifest=str(manifest_path),
        samples=report.samples,
        labeled=report.labeled,
        repaired_values=report.repaired_values,
    )
    return dataset, report


def load_dataset(
    manifest_path: PathLike,
    labels_path: Optional[PathLike] = None,
    feature_dim: int = FEATURE_DIM,
) -> Dataset:
    """Ingest a dataset; see `read_dataset` for the load report."""
    dataset, _ = read_dataset(manifest_path, labels_path, feature_dim)
    return dataset


def resolve_manifest(data_dir: PathLike) -> Path:
    """Accept either a dataset directory or a manifest path."""
    path = Path(data_dir)
    return path / MANIFEST_NAME if path.is_dir() else path


def write_dataset(dataset: Dataset, out_dir: PathLike) -> Path:
    """
    Write `dataset` in the on-disk formats; returns the manifest path.

    Features are stored as float32, so values round-trip exactly only when
    they are already float32-representable.
    """
    out_dir = Path(out_dir)
    (out_dir / FEATURES_DIRNAME).mkdir(parents=True, exist_ok=True)

    lines = []
    for seq in dataset.sequences:
        relative = f"{FEATURES_DIRNAME}/{seq.id}.fsq"
        write_feature_file(out_dir / relative, seq.features)
        lines.append(f"{seq.id},{relative},{seq.T}\n")
    manifest_path = out_dir / MANIFEST_NAME
    manifest_path.write_text("".join(lines), encoding="utf-8")

    if dataset.labels:
        rows = [[i, *dataset.labels[i].intensities.tolist()] for i in dataset.ids if i in dataset.labels]
        pd.DataFrame(rows, columns=LABEL_COLUMNS).to_csv(out_dir / LABELS_NAME, index=False)

    logger.info("dataset_written", out_dir=str(out_dir), samples=len(dataset), labeled=len(dataset.labels))
    return manifest_path
