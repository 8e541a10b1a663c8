"""Transition probabilities between complete-question families.

Exact transition matrices use Lueders conditioning: the probability of atom
i of family b given atom j of family c is Tr(B_i C_j)/Tr(C_j), which for
rank-1 atoms reduces to the squared overlap of the basis vectors. The
empirical layer draws seeded Monte-Carlo samples and rebuilds the matrix
from frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import DimensionMismatch, NonPureConditioning
from .lattice import CompleteQuestionSet, Question
from .linalg import ValidationReport, check_density

__all__ = [
    "TransitionMatrix",
    "SampleRecord",
    "born_probability",
    "transition_matrix",
    "verify_bistochastic",
    "sample_answers",
    "empirical_transition",
]


@dataclass(frozen=True)
class TransitionMatrix:
    """p[i, j] = probability of outcome i in family b given atom j of family c."""

    p: np.ndarray
    family_b: CompleteQuestionSet
    family_c: CompleteQuestionSet
    empirical: bool = False

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))


@dataclass(frozen=True)
class SampleRecord:
    """Outcome counts of repeated preparation-and-measurement trials."""

    counts: dict[int, int]
    n_trials: int
    seed: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.n_trials:
            raise ValueError("counts must sum to n_trials")


def born_probability(rho, q: Question, tol: Tolerances = DEFAULT) -> float:
    """Tr(rho P), clamped to [0, 1] after checking the clamp is within tolerance."""
    rho = check_density(rho, tol)
    if rho.shape[0] != q.dim:
        raise DimensionMismatch(f"state dim {rho.shape[0]} vs question dim {q.dim}")
    val = float(np.trace(rho @ q.projector).real)
    if val < -tol.prob_clamp or val > 1 + tol.prob_clamp:
        raise ValueError(f"Born probability {val} outside [0,1] beyond tolerance")
    return min(max(val, 0.0), 1.0)


def transition_matrix(
    b: CompleteQuestionSet, c: CompleteQuestionSet, tol: Tolerances = DEFAULT
) -> TransitionMatrix:
    """Exact p[i,j] = Tr(B_i C_j) / Tr(C_j) over all atom pairs."""
    if b.dim != c.dim:
        raise DimensionMismatch(f"family dims differ: {b.dim} vs {c.dim}")
    p = np.empty((len(b.atoms), len(c.atoms)))
    for j, cj in enumerate(c.atoms):
        tr_c = float(np.trace(cj).real)
        for i, bi in enumerate(b.atoms):
            p[i, j] = float(np.trace(bi @ cj).real) / tr_c
    return TransitionMatrix(p=np.clip(p, 0.0, 1.0), family_b=b, family_c=c)


def verify_bistochastic(t: TransitionMatrix, tol: Tolerances = DEFAULT) -> ValidationReport:
    """Check range, column sums, and row sums of a transition matrix.

    Column sums are a theorem (the b-atoms resolve the identity). Row sums
    equal 1 only when both families have all-rank-1 atoms; a failure with
    higher-rank atoms is flagged as such, not treated as numerical error.
    """
    p = t.p
    dev = {
        "range_violation": float(max(np.max(-p), np.max(p - 1), 0.0)),
        "column_sum": float(np.max(np.abs(p.sum(axis=0) - 1))),
        "row_sum": float(np.max(np.abs(p.sum(axis=1) - 1))),
    }
    msgs = []
    passed = dev["range_violation"] <= tol.resolution and dev["column_sum"] <= tol.resolution
    rows_ok = dev["row_sum"] <= tol.resolution
    if not rows_ok:
        if not (t.family_b.all_rank_one and t.family_c.all_rank_one):
            msgs.append(
                "row sums deviate because some atoms have rank > 1 "
                f"(ranks b={t.family_b.ranks}, c={t.family_c.ranks})"
            )
        else:
            worst = np.unravel_index(np.argmax(np.abs(p.sum(axis=1) - 1)), (p.shape[0],))
            msgs.append(f"row-sum failure at row {worst[0]} with rank-1 atoms")
            passed = False
    if dev["range_violation"] > tol.resolution:
        i, j = np.unravel_index(np.argmax(np.maximum(-p, p - 1)), p.shape)
        msgs.append(f"entry ({i},{j})={p[i, j]} outside [0,1]")
    if dev["column_sum"] > tol.resolution:
        j = int(np.argmax(np.abs(p.sum(axis=0) - 1)))
        msgs.append(f"column {j} sums to {p[:, j].sum()}")
    return ValidationReport(kind="bistochastic", passed=passed, deviations=dev, messages=msgs)


def _atom_probabilities(rho: np.ndarray, atoms: CompleteQuestionSet, tol: Tolerances) -> np.ndarray:
    probs = np.array([float(np.trace(rho @ a).real) for a in atoms.atoms])
    if probs.min() < -tol.prob_clamp:
        raise ValueError(f"negative atom probability {probs.min():.3e} beyond tolerance")
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_answers(
    rho, atoms: CompleteQuestionSet, n: int, seed: int, tol: Tolerances = DEFAULT
) -> SampleRecord:
    """n i.i.d. atom-index draws with probabilities Tr(rho Q_i).

    Every trial measures a fresh preparation of rho; there is no collapse
    chaining. Sampling is inverse-CDF over a PCG64 stream, so identical
    seeds give identical counts.
    """
    rho = check_density(rho, tol)
    if rho.shape[0] != atoms.dim:
        raise DimensionMismatch(f"state dim {rho.shape[0]} vs atoms dim {atoms.dim}")
    if n < 1:
        raise ValueError("n must be >= 1")
    probs = _atom_probabilities(rho, atoms, tol)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    counts = {i: 0 for i in range(len(atoms.atoms))}
    for i, c in zip(*np.unique(idx, return_counts=True)):
        counts[int(i)] = int(c)
    return SampleRecord(counts=counts, n_trials=n, seed=seed)


def empirical_transition(
    b: CompleteQuestionSet,
    c: CompleteQuestionSet,
    n_per_column: int,
    seed: int,
    tol: Tolerances = DEFAULT,
) -> TransitionMatrix:
    """Frequency estimate of transition_matrix(b, c).

    Column j prepares the pure state C_j / Tr(C_j) and samples n_per_column
    outcomes in family b. Each column draws from an independent stream keyed
    by (seed, column), so columns may be evaluated in any order.
    """
    if b.dim != c.dim:
        raise DimensionMismatch(f"family dims differ: {b.dim} vs {c.dim}")
    if not c.all_rank_one:
        raise NonPureConditioning(
            f"conditioning atoms must be rank-1, got ranks {c.ranks}"
        )
    p = np.zeros((len(b.atoms), len(c.atoms)))
    for j, cj in enumerate(c.atoms):
        state = cj / float(np.trace(cj).real)
        col_seed = np.random.SeedSequence((seed, j))
        probs = _atom_probabilities(state, b, tol)
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        rng = np.random.Generator(np.random.PCG64(col_seed))
        idx = np.searchsorted(cdf, rng.random(n_per_column), side="right")
        for i, cnt in zip(*np.unique(idx, return_counts=True)):
            p[int(i), j] = cnt / n_per_column
    return TransitionMatrix(p=p, family_b=b, family_c=c, empirical=True)
