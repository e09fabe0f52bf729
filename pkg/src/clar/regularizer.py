"""Affine alignment penalty between paired head rows.

For row-aligned pairs (u_i, v_i) the penalty is

    sum_i || u_i - (Psi v_i + b) ||^2

The caller applies the weight lambda. The transform (Psi, b) maps target
prototypes onto the source prototype configuration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NumericError
from .labels import LabeledMatrix, LabelId


@dataclass
class AffineTransform:
    psi: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=float)
        self.b = np.asarray(self.b, dtype=float)
        d = self.psi.shape[0]
        if self.psi.shape != (d, d) or self.b.shape != (d,):
            raise ValueError(f"bad transform shapes {self.psi.shape}, {self.b.shape}")

    @property
    def dim(self) -> int:
        return self.b.shape[0]

    @classmethod
    def identity(cls, d: int) -> "AffineTransform":
        return cls(np.eye(d), np.zeros(d))

    def apply(self, V: np.ndarray) -> np.ndarray:
        return np.asarray(V, dtype=float) @ self.psi.T + self.b

    def to_matrix(self) -> LabeledMatrix:
        labels = [LabelId("PSI", str(i)) for i in range(self.dim)] + [LabelId("B", "0")]
        return LabeledMatrix(tuple(labels), np.vstack([self.psi, self.b[None, :]]))

    @classmethod
    def from_matrix(cls, m: LabeledMatrix) -> "AffineTransform":
        d = m.dim
        psi_rows = [m.index(LabelId("PSI", str(i))) for i in range(d)]
        return cls(m.rows[psi_rows], m.rows[m.index(LabelId("B", "0"))])


@dataclass(frozen=True)
class PenaltyConfig:
    lam: float = 0.1
    ridge: float = 1e-8

    def __post_init__(self):
        if self.lam < 0 or self.ridge < 0:
            raise ValueError("lambda and ridge must be non-negative")


class ClarGradients(NamedTuple):
    psi: np.ndarray
    b: np.ndarray
    u: np.ndarray
    v: np.ndarray


def _residuals(U_p, V_p, t: AffineTransform) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    U_p = np.atleast_2d(np.asarray(U_p, dtype=float))
    V_p = np.atleast_2d(np.asarray(V_p, dtype=float))
    if U_p.shape != V_p.shape or U_p.shape[1] != t.dim:
        raise ValueError(f"shape mismatch: U {U_p.shape}, V {V_p.shape}, transform {t.dim}")
    return U_p, V_p, U_p - V_p @ t.psi.T - t.b


def clar_penalty(U_p, V_p, t: AffineTransform) -> float:
    _, _, r = _residuals(U_p, V_p, t)
    return float(np.sum(r * r))


def clar_gradients(U_p, V_p, t: AffineTransform) -> ClarGradients:
    """Gradients of the penalty w.r.t. Psi, b and the paired rows."""
    _, V_p, r = _residuals(U_p, V_p, t)
    return ClarGradients(
        psi=-2.0 * r.T @ V_p,
        b=-2.0 * r.sum(axis=0),
        u=2.0 * r,
        v=-2.0 * r @ t.psi,
    )


def fit_affine_least_squares(U_p, V_p, ridge: float = 1e-8) -> AffineTransform:
    """Closed-form minimiser of the penalty plus ``ridge * ||Psi||_F^2``.

    The translation is not shrunk. Solved through the normal equations of
    the augmented design [V, 1].
    """
    U_p = np.atleast_2d(np.asarray(U_p, dtype=float))
    V_p = np.atleast_2d(np.asarray(V_p, dtype=float))
    if U_p.shape != V_p.shape:
        raise ValueError(f"shape mismatch: {U_p.shape} vs {V_p.shape}")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    K, d = V_p.shape
    X = np.hstack([V_p, np.ones((K, 1))])
    if ridge == 0 and np.linalg.matrix_rank(X) < d + 1:
        raise NumericError("rank-deficient design; use ridge > 0")
    A = X.T @ X
    A[np.arange(d), np.arange(d)] += ridge
    W = np.linalg.solve(A, X.T @ U_p)
    return AffineTransform(W[:d].T, W[d])
