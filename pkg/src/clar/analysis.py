"""Geometry diagnostics for label prototype rows.

Two views: a 2-D principal projection of head rows, and a comparison of
the internal distance structure of matched source and target rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, DegenerateInputError
from .labels import LabeledMatrix, LabelId
from .regularizer import AffineTransform

TOLERANCE = 1e-10
MAX_ITERATIONS = 10_000


@dataclass(frozen=True)
class ProjectionResult:
    labels: tuple[LabelId, ...]
    coordinates: np.ndarray      # (rows, k)
    singular_values: np.ndarray  # (k,), descending

    def to_tsv(self) -> str:
        return "".join(f"{lab.language}\t{lab.name}\t" + "\t".join(f"{x:.17g}" for x in row) + "\n"
                       for lab, row in zip(self.labels, self.coordinates))


@dataclass(frozen=True)
class ManifoldReport:
    dist_source: np.ndarray
    dist_target: np.ndarray
    pearson: float
    frobenius_sq_diff: float

    def summary_tsv(self) -> str:
        return (f"pairs\t{self.dist_source.shape[0]}\n"
                f"pearson\t{self.pearson:.17g}\n"
                f"frobenius_sq_diff\t{self.frobenius_sq_diff:.17g}\n")


def _orient(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's first largest-magnitude entry is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        if col[int(np.argmax(np.abs(col)))] < 0:
            out[:, j] = -col
    return out


def top_eigenvectors(gram: np.ndarray, k: int, tol: float = TOLERANCE,
                     max_iter: int = MAX_ITERATIONS) -> tuple[np.ndarray, np.ndarray]:
    """Leading k eigenpairs of a symmetric PSD matrix by orthogonal iteration.

    Converged when the eigen-residual ||G Q - Q diag(lam)|| falls below
    ``tol * max(1, ||G||)``.
    """
    d = gram.shape[0]
    scale = max(1.0, float(np.linalg.norm(gram)))
    if not np.any(gram):
        return np.zeros(k), np.eye(d)[:, :k]
    # deterministic start that is not orthogonal to any eigenvector in general position
    start = np.cos(np.outer(np.arange(1, d + 1), np.arange(1, k + 1)) * 0.7) + np.eye(d)[:, :k]
    q, _ = np.linalg.qr(start)
    for _ in range(max_iter):
        z = gram @ q
        eig = np.einsum("ij,ij->j", q, z)
        if np.linalg.norm(z - q * eig) <= tol * scale:
            order = np.argsort(-eig, kind="stable")
            return np.clip(eig[order], 0.0, None), q[:, order]
        q, r = np.linalg.qr(z)
        # keep column signs stable across iterations
        q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
    raise ConvergenceError(f"orthogonal iteration did not converge in {max_iter} steps")


def svd_project(m: LabeledMatrix | np.ndarray, k: int = 2,
                labels: Sequence[LabelId] | None = None) -> ProjectionResult:
    """Mean-center the rows and project them onto the top-k right singular vectors."""
    if isinstance(m, LabeledMatrix):
        labels, rows = m.labels, m.rows
    else:
        rows = np.asarray(m, dtype=float)
        labels = tuple(labels) if labels is not None else tuple(
            LabelId("_", str(i)) for i in range(rows.shape[0]))
    n, d = rows.shape
    if n < 1:
        raise ValueError("need at least one row")
    if not 1 <= k <= min(n, d):
        raise ValueError(f"k={k} exceeds min(rows, dim) = {min(n, d)}")
    centered = rows - rows.mean(axis=0)
    eig, vecs = top_eigenvectors(centered.T @ centered, k)
    vecs = _orient(vecs)
    return ProjectionResult(tuple(labels), centered @ vecs, np.sqrt(eig))


def pairwise_distances(rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] < 1:
        raise ValueError("need a non-empty 2-D matrix")
    diff = rows[:, None, :] - rows[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float) - np.mean(x)
    y = np.asarray(y, dtype=float) - np.mean(y)
    sx, sy = float(np.sqrt(x @ x)), float(np.sqrt(y @ y))
    if sx == 0.0 or sy == 0.0:
        raise DegenerateInputError("correlation undefined: zero variance")
    return float(np.clip((x @ y) / (sx * sy), -1.0, 1.0))


def manifold_report(U_p: np.ndarray, V_p: np.ndarray,
                    transform: AffineTransform | None = None) -> ManifoldReport:
    """Compare the distance structure of row-aligned source and target rows.

    Target rows are used raw unless ``transform`` is given.
    """
    U_p = np.asarray(U_p, dtype=float)
    V_p = np.asarray(V_p, dtype=float)
    if U_p.shape[0] != V_p.shape[0]:
        raise ValueError(f"{U_p.shape[0]} source rows vs {V_p.shape[0]} target rows")
    if U_p.shape[0] < 3:
        raise DegenerateInputError("need at least 3 pairs for a correlation")
    if transform is not None:
        V_p = transform.apply(V_p)
    ds, dt = pairwise_distances(U_p), pairwise_distances(V_p)
    iu = np.triu_indices(ds.shape[0], k=1)
    r = pearson(ds[iu], dt[iu])
    return ManifoldReport(ds, dt, r, float(np.sum((ds - dt) ** 2)))


def matrix_tsv(labels: Sequence[LabelId], d: np.ndarray) -> str:
    head = "\t" + "\t".join(f"{lab.language}:{lab.name}" for lab in labels)
    body = [f"{lab.language}:{lab.name}\t" + "\t".join(f"{x:.17g}" for x in row)
            for lab, row in zip(labels, d)]
    return "\n".join([head, *body]) + "\n"


def pair_segments(U: LabeledMatrix, V: LabeledMatrix, pairs: Sequence[tuple[LabelId, LabelId]],
                  k: int = 2) -> str:
    """Endpoints of lines joining paired labels in one joint projection.

    Both heads are projected together so that the segments share axes.
    Columns: source label, target label, then source and target coordinates.
    """
    joint = LabeledMatrix(U.labels + V.labels, np.vstack([U.rows, V.rows]))
    proj = svd_project(joint, k)
    at = {lab: row for lab, row in zip(proj.labels, proj.coordinates)}
    lines = []
    for s, t in pairs:
        coords = "\t".join(f"{x:.17g}" for x in (*at[s], *at[t]))
        lines.append(f"{s.language}:{s.name}\t{t.language}:{t.name}\t{coords}")
    return "".join(line + "\n" for line in lines)
