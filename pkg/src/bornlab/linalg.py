"""Dense complex linear algebra: tensor products, partial traces, Hermitian
matrix exponentials, and operator-class validation.

All functions accept and return plain numpy arrays (complex128). Input
validation helpers (`check_*`) coerce and verify their argument and return
it, sklearn-style; `validate` produces a non-throwing report instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DimensionMismatch, NotHermitian

__all__ = [
    "ValidationReport",
    "check_square",
    "check_hermitian",
    "check_unitary",
    "check_projector",
    "check_density",
    "projector_rank",
    "tensor_product",
    "partial_trace",
    "mat_exp_hermitian",
    "validate",
]


@dataclass
class ValidationReport:
    """Outcome of a non-throwing check: verdict plus worst-case deviations."""

    kind: str
    passed: bool
    deviations: dict[str, float] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(
            kind=f"{self.kind}+{other.kind}",
            passed=self.passed and other.passed,
            deviations={**self.deviations, **other.deviations},
            messages=self.messages + other.messages,
        )


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.view(float))):
        raise ValueError("matrix contains NaN or Inf entries")
    return a


def check_square(m) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    return _as_matrix(m)


def _maxnorm(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0


def check_hermitian(m, tol: Tolerances = DEFAULT) -> np.ndarray:
    a = _as_matrix(m)
    dev = _maxnorm(a - a.conj().T)
    if dev > tol.hermitian:
        raise NotHermitian(f"max |M - M^dag| = {dev:.3e} > {tol.hermitian:.1e}")
    return a


def check_unitary(m, tol: Tolerances = DEFAULT) -> np.ndarray:
    a = _as_matrix(m)
    dev = _maxnorm(a.conj().T @ a - np.eye(a.shape[0]))
    if dev > tol.unitary:
        raise ValueError(f"max |U^dag U - I| = {dev:.3e} > {tol.unitary:.1e}")
    return a


def check_projector(m, tol: Tolerances = DEFAULT) -> np.ndarray:
    a = _as_matrix(m)
    herm = _maxnorm(a - a.conj().T)
    idem = _maxnorm(a @ a - a)
    if herm > tol.projector or idem > tol.projector:
        raise ValueError(
            f"not a projector: hermiticity dev {herm:.3e}, idempotency dev {idem:.3e}"
        )
    return a


def check_density(m, tol: Tolerances = DEFAULT) -> np.ndarray:
    a = check_hermitian(m, tol)
    tr_dev = abs(np.trace(a).real - 1.0) + abs(np.trace(a).imag)
    if tr_dev > tol.density_trace:
        raise ValueError(f"trace deviates from 1 by {tr_dev:.3e}")
    lam_min = float(np.linalg.eigvalsh(a).min())
    if lam_min < tol.density_psd:
        raise ValueError(f"minimum eigenvalue {lam_min:.3e} below {tol.density_psd:.1e}")
    return a


def projector_rank(p, tol: Tolerances = DEFAULT) -> int:
    """Rank of a projector, counted from its near-1 eigenvalues."""
    a = check_projector(p, tol)
    lam = np.linalg.eigvalsh(a)
    return int(np.sum(lam > 0.5))


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with A-index major: entry[(i dB + k),(j dB + l)] = A[i,j] B[k,l]."""
    return np.kron(_as_matrix(a), _as_matrix(b))


def partial_trace(m, dims: tuple[int, int], over: str = "P") -> np.ndarray:
    """Trace out one factor of a bipartite operator on dims (dS, dP).

    over="P" leaves a dS x dS matrix, over="S" a dP x dP matrix; the total
    trace is preserved either way.
    """
    a = _as_matrix(m)
    ds, dp = dims
    if ds * dp != a.shape[0]:
        raise DimensionMismatch(f"dims {dims} do not factor matrix of dim {a.shape[0]}")
    if over not in ("S", "P"):
        raise ValueError(f"over must be 'S' or 'P', got {over!r}")
    t = a.reshape(ds, dp, ds, dp)
    if over == "P":
        return np.einsum("ikjk->ij", t)
    return np.einsum("kikj->ij", t)


def mat_exp_hermitian(h, t: float, tol: Tolerances = DEFAULT) -> np.ndarray:
    """exp(-i t H) for Hermitian H, via eigendecomposition."""
    a = check_hermitian(h, tol)
    lam, v = np.linalg.eigh(a)
    return (v * np.exp(-1j * t * lam)) @ v.conj().T


def validate(m, kind: str, tol: Tolerances = DEFAULT) -> ValidationReport:
    """Non-throwing check of one operator class; reports worst-case deviations."""
    a = _as_matrix(m)
    dev: dict[str, float] = {}
    msgs: list[str] = []
    herm = _maxnorm(a - a.conj().T)
    if kind == "hermitian":
        dev["hermiticity"] = herm
        passed = herm <= tol.hermitian
    elif kind == "unitary":
        dev["unitarity"] = _maxnorm(a.conj().T @ a - np.eye(a.shape[0]))
        passed = dev["unitarity"] <= tol.unitary
    elif kind == "projector":
        dev["hermiticity"] = herm
        dev["idempotency"] = _maxnorm(a @ a - a)
        lam = np.linalg.eigvalsh((a + a.conj().T) / 2)
        dev["eigenvalue_binarity"] = float(np.max(np.minimum(np.abs(lam), np.abs(lam - 1))))
        passed = (
            herm <= tol.projector
            and dev["idempotency"] <= tol.projector
            and dev["eigenvalue_binarity"] <= tol.projector_eig
        )
    elif kind == "density":
        dev["hermiticity"] = herm
        dev["trace_deviation"] = abs(complex(np.trace(a)) - 1.0)
        lam_min = float(np.linalg.eigvalsh((a + a.conj().T) / 2).min())
        dev["psd_violation"] = min(lam_min, 0.0)
        passed = (
            herm <= tol.hermitian
            and dev["trace_deviation"] <= tol.density_trace
            and lam_min >= tol.density_psd
        )
    else:
        raise ValueError(f"unknown kind {kind!r}")
    if not passed:
        msgs.append(f"{kind} invariants violated: {dev}")
    return ValidationReport(kind=kind, passed=passed, deviations=dev, messages=msgs)
