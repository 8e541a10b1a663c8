"""Frame functions over resolutions of the identity and density-matrix
reconstruction by linear least squares.

A frame function assigns a probability to each projector of every
resolution of the identity, with each resolution summing to 1. For d > 2
such functions are exactly the linear ones f = Tr(rho .); `fit_density`
inverts that relation in a fixed orthonormal Hermitian coordinate system,
and `qubit_counterexample` produces the nonlinear d = 2 assignments that
defeat any linear fit. The same machinery extends to general effect lists
(`fit_density_povm`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .config import DEFAULT, Tolerances
from .errors import DimensionMismatch
from .linalg import ValidationReport, check_density, check_projector

__all__ = [
    "ResolutionOfIdentity",
    "FrameSample",
    "FitResult",
    "hermitian_basis",
    "random_resolution",
    "frame_samples_from_state",
    "check_frame_function",
    "noncontextuality_check",
    "fit_density",
    "qubit_counterexample",
    "bloch_projector",
    "fit_density_povm",
    "GleasonDensityEstimator",
]


@dataclass(frozen=True)
class ResolutionOfIdentity:
    """Mutually orthogonal projectors summing to the identity."""

    projectors: tuple[np.ndarray, ...]
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        ps = tuple(np.asarray(p, dtype=complex) for p in self.projectors)
        object.__setattr__(self, "projectors", ps)
        d = ps[0].shape[0]
        for p in ps:
            check_projector(p, self.tol)
        for a, b in itertools.combinations(ps, 2):
            dev = float(np.max(np.abs(a @ b)))
            if dev > self.tol.resolution:
                raise ValueError(f"projectors not orthogonal (dev {dev:.3e})")
        total = sum(ps[1:], start=ps[0].copy())
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > self.tol.resolution:
            raise ValueError(f"projectors do not sum to identity (dev {dev:.3e})")

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]


@dataclass(frozen=True)
class FrameSample:
    """One resolution of the identity with a probability value per projector."""

    resolution: ResolutionOfIdentity
    values: tuple[float, ...]
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != len(self.resolution.projectors):
            raise ValueError("one value per projector required")
        lo, hi = min(vals), max(vals)
        if lo < -self.tol.frame_value or hi > 1 + self.tol.frame_value:
            raise ValueError(f"values outside [0,1]: min {lo}, max {hi}")
        if abs(sum(vals) - 1.0) > self.tol.frame_sum:
            raise ValueError(f"values sum to {sum(vals)}, not 1")


@dataclass
class FitResult:
    """Least-squares reconstruction with post-hoc physicality diagnostics."""

    rho_hat: np.ndarray
    residual: float
    psd_violation: float
    trace_deviation: float
    rank: int
    rank_deficient: bool


def hermitian_basis(d: int) -> list[np.ndarray]:
    """Orthonormal basis of d x d Hermitian matrices under Tr(A B).

    Generalized Gell-Mann matrices (symmetric, antisymmetric, diagonal
    traceless) plus the normalized identity, so expansion coefficients of
    any Hermitian matrix are real.
    """
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            basis.append(sym)
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1j / np.sqrt(2)
            anti[k, j] = 1j / np.sqrt(2)
            basis.append(anti)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag).astype(complex) / np.sqrt(l * (l + 1)))
    return basis


def random_resolution(d: int, rng: np.random.Generator) -> ResolutionOfIdentity:
    """Rank-1 resolution from the eigenframe of a random Hermitian matrix."""
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    _, v = np.linalg.eigh((a + a.conj().T) / 2)
    return ResolutionOfIdentity(
        projectors=tuple(np.outer(v[:, k], v[:, k].conj()) for k in range(d))
    )


def frame_samples_from_state(
    rho, resolutions: list[ResolutionOfIdentity], tol: Tolerances = DEFAULT
) -> list[FrameSample]:
    """Forward-generate f(Pi) = Tr(rho Pi) for each resolution."""
    rho = check_density(rho, tol)
    out = []
    for res in resolutions:
        if res.dim != rho.shape[0]:
            raise DimensionMismatch(f"state dim {rho.shape[0]} vs resolution dim {res.dim}")
        vals = tuple(
            min(max(float(np.trace(rho @ p).real), 0.0), 1.0) for p in res.projectors
        )
        out.append(FrameSample(resolution=res, values=vals, tol=tol))
    return out


def noncontextuality_check(
    samples: list[FrameSample], tol: Tolerances = DEFAULT
) -> ValidationReport:
    """Projectors shared across resolutions must carry the same value."""
    seen: list[tuple[np.ndarray, float, int]] = []
    conflicts = []
    worst = 0.0
    for s_idx, s in enumerate(samples):
        for p, v in zip(s.resolution.projectors, s.values):
            for q, w, o_idx in seen:
                if p.shape == q.shape and float(np.max(np.abs(p - q))) <= tol.context_match:
                    gap = abs(v - w)
                    worst = max(worst, gap)
                    if gap > tol.context_agree:
                        conflicts.append(
                            f"projector shared by samples {o_idx} and {s_idx}: "
                            f"values {w} vs {v}"
                        )
            seen.append((p, v, s_idx))
    return ValidationReport(
        kind="noncontextuality",
        passed=not conflicts,
        deviations={"max_shared_value_gap": worst},
        messages=conflicts,
    )


def check_frame_function(
    samples: list[FrameSample], tol: Tolerances = DEFAULT
) -> ValidationReport:
    """Range and per-resolution sum checks, merged with the context check."""
    dev = {"range_violation": 0.0, "sum_deviation": 0.0}
    msgs = []
    for idx, s in enumerate(samples):
        vals = np.asarray(s.values)
        dev["range_violation"] = max(
            dev["range_violation"], float(max(np.max(-vals), np.max(vals - 1), 0.0))
        )
        gap = abs(float(vals.sum()) - 1.0)
        if gap > dev["sum_deviation"]:
            dev["sum_deviation"] = gap
        if gap > tol.frame_sum:
            msgs.append(f"sample {idx}: values sum to {vals.sum()}")
    passed = (
        dev["range_violation"] <= tol.frame_value and dev["sum_deviation"] <= tol.frame_sum
    )
    base = ValidationReport(kind="frame_function", passed=passed, deviations=dev, messages=msgs)
    return base.merge(noncontextuality_check(samples, tol))


def _solve_linear(operators: list[np.ndarray], values: np.ndarray, d: int) -> FitResult:
    basis = hermitian_basis(d)
    design = np.array(
        [[float(np.trace(op @ b).real) for b in basis] for op in operators]
    )
    coeff, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    rho = sum(c * b for c, b in zip(coeff, basis))
    fitted = design @ coeff
    residual = float(np.sqrt(np.mean((fitted - values) ** 2)))
    lam_min = float(np.linalg.eigvalsh(rho).min())
    return FitResult(
        rho_hat=rho,
        residual=residual,
        psd_violation=min(lam_min, 0.0),
        trace_deviation=abs(float(np.trace(rho).real) - 1.0),
        rank=int(rank),
        rank_deficient=int(rank) < d * d,
    )


def fit_density(samples: list[FrameSample]) -> FitResult:
    """Least-squares inversion of f = Tr(rho .) over all sampled projectors.

    The minimizer runs in the real coordinate space of an orthonormal
    Hermitian basis. Positivity and unit trace are diagnosed afterwards,
    never imposed, so non-linear frame functions surface as large residuals
    rather than being projected onto state space. A design matrix of rank
    < d^2 is returned flagged (minimum-norm solution), not rejected.
    """
    if not samples:
        raise ValueError("need at least one frame sample")
    d = samples[0].resolution.dim
    ops, vals = [], []
    for s in samples:
        if s.resolution.dim != d:
            raise DimensionMismatch("mixed dimensions in frame samples")
        ops.extend(s.resolution.projectors)
        vals.extend(s.values)
    return _solve_linear(ops, np.asarray(vals, dtype=float), d)


def bloch_projector(n: np.ndarray) -> np.ndarray:
    """Rank-1 qubit projector (I + n . sigma)/2 for a unit Bloch vector."""
    nx, ny, nz = n
    return 0.5 * np.array([[1 + nz, nx - 1j * ny], [nx + 1j * ny, 1 - nz]])


def qubit_counterexample(n_directions: int, seed: int) -> list[FrameSample]:
    """Valid d = 2 frame functions that are not Tr(rho .).

    For each random Bloch direction n, the pair {P(n), P(-n)} gets the
    values (1 + nz^3)/2 and (1 - nz^3)/2: nonnegative, summing to 1, but
    cubic in n and therefore outside the linear family. Any least-squares
    density fit over enough directions has residual bounded away from zero.
    """
    if n_directions < 10:
        raise ValueError("need at least 10 directions")
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n_directions):
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        f = (1 + n[2] ** 3) / 2
        res = ResolutionOfIdentity(projectors=(bloch_projector(n), bloch_projector(-n)))
        out.append(FrameSample(resolution=res, values=(f, 1 - f)))
    return out


def fit_density_povm(samples) -> FitResult:
    """fit_density generalized from projectors to POVM effects.

    `samples` is a list of (EffectList, values) pairs; each effect list is
    verified as a POVM and each value list must sum to 1.
    """
    from .povm import verify_povm
    from .errors import InvalidPOVM

    if not samples:
        raise ValueError("need at least one effect sample")
    ops, vals = [], []
    d = None
    for effects, values in samples:
        report = verify_povm(effects)
        if not report.passed:
            raise InvalidPOVM("; ".join(report.messages) or "effect list fails POVM axioms")
        if d is None:
            d = effects.dim
        elif effects.dim != d:
            raise DimensionMismatch("mixed dimensions in POVM samples")
        if len(values) != len(effects.effects):
            raise ValueError("one value per effect required")
        if abs(sum(values) - 1.0) > DEFAULT.frame_sum:
            raise ValueError(f"values sum to {sum(values)}, not 1")
        ops.extend(effects.effects)
        vals.extend(float(v) for v in values)
    return _solve_linear(ops, np.asarray(vals, dtype=float), d)


class GleasonDensityEstimator(BaseEstimator):
    """sklearn-style wrapper around fit_density / fit_density_povm.

    fit(X) accepts a list of FrameSample (projective data) or, with
    effect_mode=True, a list of (EffectList, values) pairs; the recovered
    state and diagnostics land in fitted attributes, and predict(projectors)
    returns Born probabilities under the fitted state.
    """

    def __init__(self, effect_mode: bool = False):
        self.effect_mode = effect_mode

    def fit(self, X, y=None):
        result = fit_density_povm(X) if self.effect_mode else fit_density(X)
        self.rho_ = result.rho_hat
        self.residual_ = result.residual
        self.psd_violation_ = result.psd_violation
        self.trace_deviation_ = result.trace_deviation
        self.rank_ = result.rank
        self.rank_deficient_ = result.rank_deficient
        return self

    def predict(self, projectors):
        if not hasattr(self, "rho_"):
            raise RuntimeError("estimator is not fitted")
        return np.array(
            [float(np.trace(self.rho_ @ np.asarray(p, dtype=complex)).real) for p in projectors]
        )
