"""Yes-no questions as projectors and their lattice structure.

Questions are closed subspaces of a finite-dimensional Hilbert space,
represented by their orthogonal projectors. The module supplies the lattice
connectives (negation, meet, join), implication and orthogonality tests,
complete-question atoms generated by commuting families, Boolean algebras
over those atoms, an orthomodularity/distributivity checker, and
superselection-sector detection via the commutant.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import (
    DimensionMismatch,
    IncompleteFamily,
    NonCommutingFamily,
    SizeLimit,
)
from .linalg import check_projector, projector_rank

__all__ = [
    "Question",
    "QuestionFamily",
    "AnswerString",
    "CompleteQuestionSet",
    "LatticeReport",
    "zero_question",
    "sure_question",
    "negation",
    "meet",
    "join",
    "implies",
    "orthogonal",
    "complete_questions",
    "boolean_algebra_from_atoms",
    "check_orthomodular",
    "relation_tables",
    "superselection_sectors",
]


@dataclass(frozen=True)
class Question:
    """A yes-no question: an orthogonal projector plus a human label."""

    projector: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "projector", check_projector(self.projector))
        self.projector.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.projector.shape[0]

    @property
    def rank(self) -> int:
        return projector_rank(self.projector)


def zero_question(dim: int) -> Question:
    """The always-false question (zero projector)."""
    return Question(np.zeros((dim, dim), dtype=complex), label="Q0")


def sure_question(dim: int) -> Question:
    """The always-true question (identity projector)."""
    return Question(np.eye(dim, dtype=complex), label="Qinf")


@dataclass(frozen=True)
class QuestionFamily:
    """An ordered set of N pairwise-commuting independent questions."""

    questions: tuple[Question, ...]
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        qs = tuple(self.questions)
        object.__setattr__(self, "questions", qs)
        if not qs:
            raise ValueError("family must contain at least one question")
        dims = {q.dim for q in qs}
        if len(dims) != 1:
            raise DimensionMismatch(f"mixed dimensions in family: {sorted(dims)}")
        for a, b in itertools.combinations(qs, 2):
            comm = a.projector @ b.projector - b.projector @ a.projector
            dev = float(np.max(np.abs(comm)))
            if dev > self.tol.commute:
                raise NonCommutingFamily(
                    f"questions {a.label!r} and {b.label!r} do not commute (dev {dev:.3e})"
                )

    @property
    def size(self) -> int:
        return len(self.questions)

    @property
    def dim(self) -> int:
        return self.questions[0].dim


@dataclass(frozen=True)
class AnswerString:
    """One joint outcome of asking all questions in a family, as booleans."""

    bits: tuple[bool, ...]
    family: QuestionFamily

    def __post_init__(self):
        if len(self.bits) != self.family.size:
            raise ValueError("answer string length must equal family size")


@dataclass(frozen=True)
class CompleteQuestionSet:
    """The 2^N atoms generated by a family: orthogonal projectors summing to I."""

    atoms: tuple[np.ndarray, ...]
    family: QuestionFamily | None = None
    tol: Tolerances = DEFAULT

    def __post_init__(self):
        atoms = tuple(np.asarray(a, dtype=complex) for a in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        d = atoms[0].shape[0]
        for a in atoms:
            check_projector(a, self.tol)
        for i, j in itertools.combinations(range(len(atoms)), 2):
            dev = float(np.max(np.abs(atoms[i] @ atoms[j])))
            if dev > self.tol.commute:
                raise ValueError(f"atoms {i},{j} not orthogonal (dev {dev:.3e})")
        total = sum(atoms[1:], start=atoms[0].copy())
        dev = float(np.max(np.abs(total - np.eye(d))))
        if dev > self.tol.resolution:
            raise ValueError(f"atoms do not resolve identity (dev {dev:.3e})")

    @property
    def dim(self) -> int:
        return self.atoms[0].shape[0]

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(projector_rank(a) for a in self.atoms)

    @property
    def all_rank_one(self) -> bool:
        return all(r == 1 for r in self.ranks)


def negation(q: Question) -> Question:
    """Complement question: projector I - P."""
    d = q.dim
    return Question(np.eye(d) - q.projector, label=f"not({q.label})")


def _range_projector(vectors: np.ndarray) -> np.ndarray:
    if vectors.shape[1] == 0:
        return np.zeros((vectors.shape[0], vectors.shape[0]), dtype=complex)
    q, _ = np.linalg.qr(vectors)
    return q @ q.conj().T


def meet(q1: Question, q2: Question, tol: Tolerances = DEFAULT) -> Question:
    """Projector onto the intersection of ranges.

    Computed as the eigenvalue-0 eigenspace of (I-P1)+(I-P2): a vector is
    annihilated by that PSD sum iff it lies in both ranges.
    """
    if q1.dim != q2.dim:
        raise DimensionMismatch("meet of questions on different spaces")
    d = q1.dim
    s = (np.eye(d) - q1.projector) + (np.eye(d) - q2.projector)
    lam, v = np.linalg.eigh(s)
    kernel = v[:, lam < tol.subspace]
    return Question(_range_projector(kernel), label=f"({q1.label} and {q2.label})")


def join(q1: Question, q2: Question, tol: Tolerances = DEFAULT) -> Question:
    """Projector onto the span of the union of ranges, via De Morgan."""
    out = negation(meet(negation(q1), negation(q2), tol))
    return Question(out.projector, label=f"({q1.label} or {q2.label})")


def implies(q1: Question, q2: Question, tol: Tolerances = DEFAULT) -> bool:
    """range(P1) contained in range(P2), tested as |P2 P1 - P1| <= tol."""
    if q1.dim != q2.dim:
        raise DimensionMismatch("implication between questions on different spaces")
    dev = float(np.max(np.abs(q2.projector @ q1.projector - q1.projector)))
    return dev <= tol.subspace


def orthogonal(q1: Question, q2: Question, tol: Tolerances = DEFAULT) -> bool:
    """q1 implies not-q2; equivalently |P1 P2| <= tol."""
    if q1.dim != q2.dim:
        raise DimensionMismatch("orthogonality between questions on different spaces")
    dev = float(np.max(np.abs(q1.projector @ q2.projector)))
    return dev <= tol.subspace


def complete_questions(family: QuestionFamily) -> CompleteQuestionSet:
    """All 2^N joint atoms of a commuting family.

    Atom i (i = 1..2^N) is the product over questions a of Q_a or (I - Q_a),
    selected by bit a of the binary expansion of i-1 with the last question
    on the least-significant bit. Raises IncompleteFamily when any product
    vanishes, since then the family cannot distinguish 2^N outcomes.
    """
    n = family.size
    d = family.dim
    eye = np.eye(d, dtype=complex)
    atoms = []
    for i in range(2**n):
        prod = eye.copy()
        for a, q in enumerate(family.questions):
            bit = (i >> (n - 1 - a)) & 1
            prod = prod @ (q.projector if bit else eye - q.projector)
        if float(np.max(np.abs(prod))) <= family.tol.subspace:
            raise IncompleteFamily(
                f"atom {i + 1} of {2**n} vanishes; family is not independent in d={d}"
            )
        # symmetrize: commuting projector products are projectors up to roundoff
        atoms.append((prod + prod.conj().T) / 2)
    return CompleteQuestionSet(atoms=tuple(atoms), family=family, tol=family.tol)


def boolean_algebra_from_atoms(atoms: CompleteQuestionSet) -> list[Question]:
    """All 2^(2^N) unions of disjoint atom subsets, as questions.

    Capped at 2^N <= 8 atoms (256 elements) to keep the exhaustive
    distributivity checks tractable.
    """
    m = len(atoms.atoms)
    if m > 8:
        raise SizeLimit(f"algebra over {m} atoms has 2^{m} elements; cap is 8 atoms")
    d = atoms.dim
    out = []
    for mask in range(2**m):
        p = np.zeros((d, d), dtype=complex)
        for k in range(m):
            if (mask >> k) & 1:
                p = p + atoms.atoms[k]
        out.append(Question(p, label=f"atoms[{mask:0{m}b}]"))
    return out


@dataclass
class LatticeReport:
    """Result of orthomodularity and distributivity checks over a question set."""

    closed_under_negation: bool
    orthomodular_violations: list[tuple[int, int, float]] = field(default_factory=list)
    distributivity_violations: list[tuple[int, int, int, float]] = field(default_factory=list)
    max_orthomodular_deviation: float = 0.0
    comparable_pairs: int = 0
    messages: list[str] = field(default_factory=list)

    @property
    def orthomodular(self) -> bool:
        return self.closed_under_negation and not self.orthomodular_violations

    @property
    def distributive(self) -> bool:
        return not self.distributivity_violations


def check_orthomodular(
    elements: list[Question],
    tol: Tolerances = DEFAULT,
    check_distributivity: bool = True,
) -> LatticeReport:
    """Verify the orthomodular law b = a v (b ^ not-a) on all comparable pairs.

    Also records distributivity failures a^(bvc) != (a^b)v(a^c); those are
    expected for non-commuting projectors and demonstrate the non-Boolean
    structure rather than a defect.
    """
    report = LatticeReport(closed_under_negation=True)
    for idx, q in enumerate(elements):
        neg = negation(q).projector
        if not any(float(np.max(np.abs(e.projector - neg))) <= tol.subspace for e in elements):
            report.closed_under_negation = False
            report.messages.append(f"NotClosed: element {idx} ({q.label!r}) lacks its negation")
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            if i == j or not implies(a, b, tol):
                continue
            report.comparable_pairs += 1
            rhs = join(a, meet(b, negation(a), tol), tol).projector
            dev = float(np.max(np.abs(rhs - b.projector)))
            report.max_orthomodular_deviation = max(report.max_orthomodular_deviation, dev)
            if dev > tol.subspace:
                report.orthomodular_violations.append((i, j, dev))
    if check_distributivity:
        for (i, a), (j, b), (k, c) in itertools.product(enumerate(elements), repeat=3):
            lhs = meet(a, join(b, c, tol), tol).projector
            rhs = join(meet(a, b, tol), meet(a, c, tol), tol).projector
            dev = float(np.max(np.abs(lhs - rhs)))
            if dev > tol.subspace:
                report.distributivity_violations.append((i, j, k, dev))
    return report


def relation_tables(questions: list[Question], tol: Tolerances = DEFAULT):
    """Boolean implication and orthogonality tables over all ordered pairs."""
    n = len(questions)
    imp = np.zeros((n, n), dtype=bool)
    orth = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(questions):
        for j, b in enumerate(questions):
            imp[i, j] = implies(a, b, tol)
            orth[i, j] = orthogonal(a, b, tol)
    return imp, orth


def _commutant_basis(generators: list[np.ndarray], d: int) -> list[np.ndarray]:
    """Orthonormal Hermitian basis of {X : XA = AX for all generators A}."""
    eye = np.eye(d)
    rows = [np.kron(eye, a) - np.kron(a.T, eye) for a in generators]
    system = np.vstack(rows) if rows else np.zeros((0, d * d))
    _, s, vh = np.linalg.svd(system)
    tol = max(system.shape) * np.finfo(float).eps * (s[0] if s.size else 1.0)
    rank = int((s > tol).sum())
    null = vh[rank:].conj()
    basis = []
    for row in null:
        x = row.reshape(d, d)
        for part in (x + x.conj().T, 1j * (x - x.conj().T)):
            for b in basis:
                part = part - np.trace(b.conj().T @ part) * b
            nrm = np.linalg.norm(part)
            if nrm > 1e-10:
                basis.append(part / nrm)
    return basis


def superselection_sectors(
    questions: list[Question],
    seed: int = 7,
    tol: Tolerances = DEFAULT,
) -> list[np.ndarray]:
    """Central projectors of the *-algebra generated by the questions.

    The center is the commutant of (generators + their commutant); a seeded
    random Hermitian central element generically has distinct eigenvalues on
    distinct sectors, so its clustered eigenprojectors are the sectors.
    """
    if not questions:
        raise ValueError("need at least one question")
    d = questions[0].dim
    gens = [np.eye(d, dtype=complex)] + [q.projector for q in questions]
    commutant = _commutant_basis(gens, d)
    center = _commutant_basis(gens + commutant, d)
    rng = np.random.default_rng(seed)
    z = sum(float(c) * b for c, b in zip(rng.normal(size=len(center)), center))
    lam, v = np.linalg.eigh(z)
    sectors = []
    start = 0
    for k in range(1, d + 1):
        if k == d or lam[k] - lam[k - 1] > tol.sector_cluster:
            block = v[:, start:k]
            sectors.append(block @ block.conj().T)
            start = k
    return sectors
