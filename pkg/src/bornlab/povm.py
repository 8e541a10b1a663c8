"""Ancilla measurement models, derived effect operators, and Naimark dilation.

A system coupled unitarily to an ancilla that is then measured projectively
induces generalized measurement statistics on the system alone. The effects
are obtained by tracing out the ancilla; `joint_probability` computes the
same numbers in the joint picture without a partial trace and serves as the
independent oracle for `derive_povm`. `naimark_dilate` goes the other way,
realizing any effect list as a projective measurement on a larger space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import DEFAULT, Tolerances
from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InvalidPOVM,
    InvariantViolation,
)
from .linalg import (
    ValidationReport,
    check_density,
    check_hermitian,
    check_projector,
    check_unitary,
    partial_trace,
    tensor_product,
)

__all__ = [
    "AncillaModel",
    "EffectList",
    "NaimarkDilation",
    "derive_povm",
    "joint_probability",
    "verify_povm",
    "naimark_dilate",
    "unitary_completion",
]


@dataclass(frozen=True)
class AncillaModel:
    """Joint unitary, ancilla state, and ancilla readout projectors."""

    dS: int
    dP: int
    U: np.ndarray
    rho_P: np.ndarray
    projectors_P: tuple[np.ndarray, ...]
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        object.__setattr__(self, "U", check_unitary(self.U, self.tol))
        object.__setattr__(self, "rho_P", check_density(self.rho_P, self.tol))
        ps = tuple(check_projector(np.asarray(p, dtype=complex), self.tol)
                   for p in self.projectors_P)
        object.__setattr__(self, "projectors_P", ps)
        if self.U.shape[0] != self.dS * self.dP:
            raise DimensionMismatch(
                f"U has dim {self.U.shape[0]}, expected {self.dS}*{self.dP}"
            )
        if self.rho_P.shape[0] != self.dP:
            raise DimensionMismatch("rho_P dimension does not match dP")
        for a, b in itertools.combinations(ps, 2):
            if float(np.max(np.abs(a @ b))) > self.tol.resolution:
                raise ValueError("ancilla projectors are not orthogonal")
        total = sum(ps[1:], start=ps[0].copy())
        if float(np.max(np.abs(total - np.eye(self.dP)))) > self.tol.resolution:
            raise ValueError("ancilla projectors do not resolve the identity")


@dataclass(frozen=True)
class EffectList:
    """PSD effects summing to the identity; generally not orthogonal."""

    effects: tuple[np.ndarray, ...]
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        es = tuple(check_hermitian(np.asarray(e, dtype=complex), self.tol.override(hermitian=1e-10))
                   for e in self.effects)
        object.__setattr__(self, "effects", es)
        report = verify_povm(self, _validated=es)
        if not report.passed:
            raise InvalidPOVM("; ".join(report.messages))

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]


@dataclass(frozen=True)
class NaimarkDilation:
    """Isometry into system x outcome space plus the readout projectors there."""

    isometry: np.ndarray
    ancilla_dim: int
    projectors: tuple[np.ndarray, ...]

    def __post_init__(self):
        v = np.asarray(self.isometry, dtype=complex)
        object.__setattr__(self, "isometry", v)
        dev = float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))
        if dev > DEFAULT.unitary:
            raise InvariantViolation(f"V^dag V deviates from identity by {dev:.3e}")


def joint_probability(rho_S, m: AncillaModel, b: int, tol: Tolerances = DEFAULT) -> float:
    """Tr(U (rho_S x rho_P) U^dag (I x Pi_b)), computed in the joint picture."""
    rho_S = check_density(rho_S, tol)
    if rho_S.shape[0] != m.dS:
        raise DimensionMismatch(f"rho_S dim {rho_S.shape[0]} vs model dS {m.dS}")
    if not 0 <= b < len(m.projectors_P):
        raise IndexOutOfRange(f"outcome {b} not in [0, {len(m.projectors_P)})")
    joint = m.U @ tensor_product(rho_S, m.rho_P) @ m.U.conj().T
    readout = tensor_product(np.eye(m.dS), m.projectors_P[b])
    return float(np.trace(joint @ readout).real)


def derive_povm(m: AncillaModel) -> EffectList:
    """Effects reproducing the joint-picture statistics for every system state.

    E_b = Tr_P((I x rho_P) U^dag (I x Pi_b) U); this ordering (conjugation
    by U^dag around the readout projector) is the one fixed by the
    probability contract Tr(rho_S E_b) = joint_probability for all rho_S.
    """
    eye_s = np.eye(m.dS)
    weighted = tensor_product(eye_s, m.rho_P)
    effects = []
    for pi in m.projectors_P:
        inner = m.U.conj().T @ tensor_product(eye_s, pi) @ m.U
        e = partial_trace(weighted @ inner, (m.dS, m.dP), over="P")
        effects.append((e + e.conj().T) / 2)
    try:
        return EffectList(effects=tuple(effects), tol=m.tol)
    except InvalidPOVM as exc:
        raise InvariantViolation(f"derived effects fail POVM axioms: {exc}") from exc


def verify_povm(e: EffectList, tol: Tolerances = DEFAULT, _validated=None) -> ValidationReport:
    """PSD margins, closure deviation, and per-pair orthogonality flags.

    Non-orthogonal pairs are reported informationally; they are the point of
    generalized measurements, not a failure.
    """
    effects = _validated if _validated is not None else e.effects
    d = effects[0].shape[0]
    psd_margin = min(float(np.linalg.eigvalsh(x).min()) for x in effects)
    total = sum(effects[1:], start=effects[0].copy())
    closure = float(np.max(np.abs(total - np.eye(d))))
    dev = {"min_eigenvalue": psd_margin, "closure_deviation": closure}
    msgs = []
    nonorth = []
    for i, j in itertools.combinations(range(len(effects)), 2):
        overlap = float(np.max(np.abs(effects[i] @ effects[j])))
        if overlap > tol.resolution:
            nonorth.append((i, j, overlap))
    if nonorth:
        msgs.append(f"non-orthogonal effect pairs (informational): {nonorth}")
    passed = psd_margin >= tol.effect_psd and closure <= tol.effect_closure
    if psd_margin < tol.effect_psd:
        msgs.insert(0, f"effect has negative eigenvalue {psd_margin:.3e}")
    if closure > tol.effect_closure:
        msgs.insert(0, f"effects sum deviates from identity by {closure:.3e}")
    return ValidationReport(kind="povm", passed=passed, deviations=dev, messages=msgs)


def _psd_sqrt(e: np.ndarray, tol: Tolerances) -> np.ndarray:
    lam, v = np.linalg.eigh(e)
    if lam.min() < tol.effect_psd:
        raise InvalidPOVM(f"effect eigenvalue {lam.min():.3e} below tolerance")
    lam = np.clip(lam, 0.0, None)
    return (v * np.sqrt(lam)) @ v.conj().T


def naimark_dilate(e: EffectList, tol: Tolerances = DEFAULT) -> NaimarkDilation:
    """Isometry V = sum_b sqrt(E_b) x |b> onto system x outcome space.

    The readout projectors I x |b><b| reproduce the effect statistics:
    V^dag (I x |b><b|) V = E_b for every b.
    """
    m = len(e.effects)
    d = e.dim
    blocks = [_psd_sqrt(x, tol) for x in e.effects]
    v = np.zeros((d * m, d), dtype=complex)
    for b, blk in enumerate(blocks):
        ket = np.zeros((m, 1))
        ket[b, 0] = 1.0
        v += np.kron(blk, ket)
    projectors = []
    for b in range(m):
        pb = np.zeros((m, m))
        pb[b, b] = 1.0
        projectors.append(tensor_product(np.eye(d), pb))
    return NaimarkDilation(isometry=v, ancilla_dim=m, projectors=tuple(projectors))


def unitary_completion(v: np.ndarray) -> np.ndarray:
    """Extend an isometry's orthonormal columns to a full unitary.

    The remaining columns are an orthonormal basis of the orthogonal
    complement of range(V). The extension is placed so that column j*m of
    the result equals column j of V: the completed unitary then acts as V
    on system states paired with the |0> ancilla state under the A-major
    Kronecker layout.
    """
    v = np.asarray(v, dtype=complex)
    n, k = v.shape
    m = n // k
    comp = scipy.linalg.null_space(v.conj().T)
    u = np.zeros((n, n), dtype=complex)
    used = 0
    for col in range(n):
        if col % m == 0 and col // m < k:
            u[:, col] = v[:, col // m]
        else:
            u[:, col] = comp[:, used]
            used += 1
    return u
