"""Unitary time evolution: propagators, Heisenberg-picture question
evolution, group-law verification, and the diagnostic inverse from
propagator back to generator."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import DEFAULT, Tolerances
from .errors import BranchCut, DimensionMismatch, ZeroTime
from .lattice import Question
from .linalg import ValidationReport, check_density, check_hermitian, mat_exp_hermitian

__all__ = [
    "Hamiltonian",
    "Propagator",
    "propagator",
    "evolve_question",
    "evolve_joint",
    "check_abelian_group",
    "hamiltonian_log",
]


@dataclass(frozen=True)
class Hamiltonian:
    """Self-adjoint generator of time translations (hbar = 1)."""

    h: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "h", check_hermitian(self.h))

    @property
    def dim(self) -> int:
        return self.h.shape[0]


@dataclass(frozen=True)
class Propagator:
    """exp(-i t H) together with the time it propagates over."""

    u: np.ndarray
    t: float

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=complex))

    @property
    def dim(self) -> int:
        return self.u.shape[0]


def propagator(h: Hamiltonian, t: float, tol: Tolerances = DEFAULT) -> Propagator:
    """U(t) = exp(-i t H); U(0) = I."""
    return Propagator(u=mat_exp_hermitian(h.h, t, tol), t=float(t))


def evolve_question(q: Question, p: Propagator) -> Question:
    """Heisenberg-picture conjugation U P U^dag; rank is preserved."""
    if q.dim != p.dim:
        raise DimensionMismatch(f"question dim {q.dim} vs propagator dim {p.dim}")
    out = p.u @ q.projector @ p.u.conj().T
    return Question((out + out.conj().T) / 2, label=q.label)


def evolve_joint(rho_SP, p: Propagator, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Schroedinger-picture conjugation U rho U^dag; trace and spectrum preserved."""
    rho = check_density(rho_SP, tol)
    if rho.shape[0] != p.dim:
        raise DimensionMismatch(f"state dim {rho.shape[0]} vs propagator dim {p.dim}")
    out = p.u @ rho @ p.u.conj().T
    return (out + out.conj().T) / 2


def check_abelian_group(
    h: Hamiltonian, times: list[float], tol: Tolerances = DEFAULT
) -> ValidationReport:
    """Composition, commutation, and inverse laws of the one-parameter group."""
    props = {t: propagator(h, t, tol).u for t in times}
    dev = {"composition": 0.0, "commutation": 0.0, "inverse": 0.0}
    for t1, t2 in itertools.product(times, repeat=2):
        u12 = props[t1] @ props[t2]
        u21 = props[t2] @ props[t1]
        u_sum = mat_exp_hermitian(h.h, t1 + t2, tol)
        dev["composition"] = max(dev["composition"], float(np.max(np.abs(u12 - u_sum))))
        dev["commutation"] = max(dev["commutation"], float(np.max(np.abs(u12 - u21))))
    for t in times:
        u_neg = mat_exp_hermitian(h.h, -t, tol)
        dev["inverse"] = max(dev["inverse"], float(np.max(np.abs(u_neg - props[t].conj().T))))
    worst = max(dev.values())
    return ValidationReport(
        kind="abelian_group",
        passed=worst <= 1e-9,
        deviations=dev,
        messages=[] if worst <= 1e-9 else [f"group-law deviation {worst:.3e}"],
    )


def hamiltonian_log(p: Propagator, tol: Tolerances = DEFAULT) -> Hamiltonian:
    """Principal generator H with p.u = exp(-i p.t H), eigenphases in (-pi, pi).

    Unitary matrices are normal, so the complex Schur form is diagonal and
    supplies an orthonormal eigenframe even with degenerate eigenvalues.
    Eigenphases within tolerance of +/-pi make H non-unique and raise
    BranchCut instead of silently picking a branch.
    """
    if p.t == 0:
        raise ZeroTime("cannot recover a generator from U(0)")
    t_mat, q = scipy.linalg.schur(p.u, output="complex")
    phases = np.angle(np.diag(t_mat))
    if np.any(np.abs(np.abs(phases) - np.pi) <= tol.branch_cut):
        raise BranchCut("eigenphase at +/-pi; generator is not unique")
    h = (q * (-phases / p.t)) @ q.conj().T
    return Hamiltonian(h=(h + h.conj().T) / 2, label="log-propagator")
