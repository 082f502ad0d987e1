"""Application builders (sparse PCA / FDA / CCA), synthetic data, loaders.

Covariances use the 1/(m-1) normalization with mean centering.  FDA and
CCA denominators get a small trace-scaled ridge so the strict positive
definiteness requirement holds.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .decomposition import ProblemInstance
from .errors import (
    DegenerateData,
    DimensionMismatch,
    EmptyFile,
    ParseError,
    SingleClass,
)

DEFAULT_RIDGE = 1e-6


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.y is not None:
            self.y = np.asarray(self.y, dtype=float)
        if not np.all(np.isfinite(self.X)):
            raise DegenerateData("feature matrix contains NaN/Inf")
        if self.X.shape[0] < 2:
            raise DegenerateData("need at least two samples")


def _covariance(rows: np.ndarray) -> np.ndarray:
    centered = rows - rows.mean(axis=0)
    return centered.T @ centered / (rows.shape[0] - 1)


def build_pca(data: Dataset) -> ProblemInstance:
    """A = -sample covariance, C = identity."""
    sigma = _covariance(data.X)
    if not np.any(sigma):
        raise DegenerateData("covariance matrix is identically zero")
    d = sigma.shape[0]
    return ProblemInstance(A=-sigma, C=np.eye(d), s=d)


def build_fda(data: Dataset, ridge: float = DEFAULT_RIDGE) -> ProblemInstance:
    """A = -(mu1-mu2)(mu1-mu2)', C = within-class scatter plus ridge."""
    if data.y is None:
        raise SingleClass("FDA needs labels")
    pos = data.X[data.y > 0]
    neg = data.X[data.y <= 0]
    if len(pos) < 2 or len(neg) < 2:
        raise SingleClass("FDA needs at least two samples in each class")
    diff = pos.mean(axis=0) - neg.mean(axis=0)
    A = -np.outer(diff, diff)
    C = _covariance(pos) + _covariance(neg)
    d = C.shape[0]
    C = C + ridge * (np.trace(C) / d) * np.eye(d)
    return ProblemInstance(A=A, C=C, s=d)


def build_cca(
    x_data: np.ndarray, y_data: np.ndarray, ridge: float = DEFAULT_RIDGE
) -> ProblemInstance:
    """Cross-covariance coupling between two views sharing the sample axis.

    Views are (m1, d) and (m2, d); the eigen-variables index the m1 + m2
    view rows, samples run along the shared axis of length d.
    """
    x_data = np.asarray(x_data, dtype=float)
    y_data = np.asarray(y_data, dtype=float)
    if x_data.shape[1] != y_data.shape[1]:
        raise DimensionMismatch(
            f"views must share the sample axis: {x_data.shape[1]} != {y_data.shape[1]}"
        )
    d = x_data.shape[1]
    if d < 2:
        raise DegenerateData("need at least two samples along the shared axis")
    xc = x_data - x_data.mean(axis=1, keepdims=True)
    yc = y_data - y_data.mean(axis=1, keepdims=True)
    sxx = xc @ xc.T / (d - 1)
    syy = yc @ yc.T / (d - 1)
    sxy = xc @ yc.T / (d - 1)
    m1, m2 = x_data.shape[0], y_data.shape[0]
    n = m1 + m2
    A = np.zeros((n, n))
    A[:m1, m1:] = -sxy
    A[m1:, :m1] = -sxy.T
    C = np.zeros((n, n))
    C[:m1, :m1] = sxx
    C[m1:, m1:] = syy
    C = C + ridge * (np.trace(C) / n) * np.eye(n)
    return ProblemInstance(A=A, C=C, s=n)


def gen_randn(m: int, d: int, seed: int) -> Dataset:
    """Standard Gaussian features with random sign labels (0 maps to +1)."""
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((m, d))
    y = np.sign(rng.standard_normal(m))
    y[y == 0] = 1.0
    return Dataset(X=X, y=y, name=f"randn-{d}")


def load_libsvm(path, d: int | None = None) -> Dataset:
    """Sparse LIBSVM text format: 'label idx:val ...' with 1-based indices."""
    rows: list[dict[int, float]] = []
    labels: list[float] = []
    max_index = 0
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            try:
                label = float(tokens[0])
            except ValueError:
                raise ParseError(f"bad label {tokens[0]!r}", line=lineno) from None
            entries: dict[int, float] = {}
            for token in tokens[1:]:
                try:
                    idx_str, val_str = token.split(":", 1)
                    idx = int(idx_str)
                    val = float(val_str)
                except ValueError:
                    raise ParseError(f"bad feature token {token!r}", line=lineno) from None
                if idx < 1:
                    raise ParseError(f"index {idx} must be >= 1", line=lineno)
                entries[idx] = val
                max_index = max(max_index, idx)
            rows.append(entries)
            labels.append(label)
    if not rows:
        raise EmptyFile(str(path))
    width = d if d is not None else max_index
    X = np.zeros((len(rows), width))
    for r, entries in enumerate(rows):
        for idx, val in entries.items():
            if idx <= width:
                X[r, idx - 1] = val
    return Dataset(X=X, y=np.asarray(labels), name=str(path))


def load_csv(path, labeled: bool = False) -> Dataset:
    """CSV with a header row; with labeled=True the last column is the label."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if len(lines) < 2:
        raise EmptyFile(str(path))
    width = len(lines[0].split(","))
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != width:
            raise ParseError(f"expected {width} columns, got {len(parts)}", line=lineno)
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise ParseError("non-numeric value", line=lineno) from None
    data = np.asarray(rows)
    if labeled:
        return Dataset(X=data[:, :-1], y=data[:, -1], name=str(path))
    return Dataset(X=data, y=None, name=str(path))


def dataset_checksum(path) -> str:
    with open(path, "rb") as handle:
        return hashlib.sha256(handle.read()).hexdigest()
