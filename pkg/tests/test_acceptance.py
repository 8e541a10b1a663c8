"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
summary lines.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest

from bornlab import born, dynamics, gleason, lattice, povm
from bornlab.cli import main as cli_main
from bornlab.lattice import CompleteQuestionSet, Question, QuestionFamily
from bornlab.povm import AncillaModel, EffectList

from conftest import (
    KET0,
    KET1,
    MINUS,
    PLUS,
    ketbra,
    random_basis_atoms,
    random_density,
    random_hermitian,
    random_unitary,
)

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "scenarios"


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def _report(num, label, passed, elapsed, limit):
    status = "PASS" if passed and elapsed < limit else "FAIL"
    print(f"ACCEPTANCE {num:2d} [{status}] {label} ({elapsed:.2f}s < {limit}s)")
    assert passed, label
    assert elapsed < limit, f"{label}: runtime {elapsed:.2f}s over {limit}s budget"


def _rank1_family(n, rng):
    """N commuting questions over d = 2^N whose atoms are a random rank-1 basis."""
    d = 2**n
    u = random_unitary(d, rng)
    basis = [ketbra(u[:, k]) for k in range(d)]
    questions = []
    for a in range(n):
        proj = sum(basis[k] for k in range(d) if (k >> (n - 1 - a)) & 1)
        questions.append(Question(np.asarray(proj), label=f"q{a}"))
    return QuestionFamily(tuple(questions))


def test_criterion_1_complete_question_closure():
    rng = np.random.default_rng(101)
    with _Timer() as t:
        ok = True
        for trial in range(50):
            n = int(rng.integers(1, 4))
            atoms = lattice.complete_questions(_rank1_family(n, rng))
            d = atoms.dim
            total = sum(atoms.atoms[1:], start=atoms.atoms[0].copy())
            ok &= float(np.max(np.abs(total - np.eye(d)))) <= 1e-10
            for i in range(len(atoms.atoms)):
                for j in range(i + 1, len(atoms.atoms)):
                    ok &= float(np.max(np.abs(atoms.atoms[i] @ atoms.atoms[j]))) <= 1e-10
            ok &= atoms.all_rank_one
    _report(1, "complete-question closure, 50 random families", ok, t.elapsed, 1.0)


def test_criterion_2_double_stochasticity():
    rng = np.random.default_rng(202)
    with _Timer() as t:
        ok = True
        for trial in range(100):
            d = int(rng.choice([2, 4, 8]))
            b = CompleteQuestionSet(atoms=random_basis_atoms(d, rng))
            c = CompleteQuestionSet(atoms=random_basis_atoms(d, rng))
            p = born.transition_matrix(b, c).p
            ok &= float(np.max(np.abs(p.sum(axis=0) - 1))) <= 1e-10
            ok &= float(np.max(np.abs(p.sum(axis=1) - 1))) <= 1e-10
            ok &= p.min() >= -1e-10 and p.max() <= 1 + 1e-10
        # rank-2-atom counterexample: row sums fail and the cause is flagged
        u = random_basis_atoms(4, rng)
        c2 = CompleteQuestionSet(atoms=(u[0] + u[1], u[2], u[3]))
        b2 = CompleteQuestionSet(atoms=random_basis_atoms(4, rng))
        rep = born.verify_bistochastic(born.transition_matrix(b2, c2))
        ok &= rep.deviations["row_sum"] > 1e-10
        ok &= any("rank > 1" in m for m in rep.messages)
    _report(2, "double stochasticity, 100 pairs + rank-2 counterexample", ok, t.elapsed, 2.0)


def test_criterion_3_empirical_convergence():
    b = CompleteQuestionSet(atoms=(ketbra(KET0), ketbra(KET1)))
    c = CompleteQuestionSet(atoms=(ketbra(PLUS), ketbra(MINUS)))
    with _Timer() as t:
        ok = True
        for seed in (1, 2, 3):
            p = born.empirical_transition(b, c, 10**5, seed=seed).p
            ok &= float(np.max(np.abs(p - 0.5))) < 0.01
    _report(3, "MUB d=2 empirical transition, n=1e5, seeds 1-3", ok, t.elapsed, 5.0)


def test_criterion_4_gleason_round_trip():
    rng = np.random.default_rng(404)
    with _Timer() as t:
        ok = True
        for d in (3, 4, 5, 6):
            for _ in range(10):
                rho = random_density(d, rng)
                resolutions = [gleason.random_resolution(d, rng) for _ in range(3 * d)]
                fit = gleason.fit_density(gleason.frame_samples_from_state(rho, resolutions))
                ok &= not fit.rank_deficient
                ok &= float(np.linalg.norm(fit.rho_hat - rho)) <= 1e-8
                ok &= fit.residual <= 1e-10
    _report(4, "Gleason round trip, d in 3..6, 10 states each", ok, t.elapsed, 10.0)


def test_criterion_5_qubit_necessity():
    with _Timer() as t:
        samples = gleason.qubit_counterexample(100, seed=42)
        ok = gleason.check_frame_function(samples).passed
        ok &= gleason.fit_density(samples).residual >= 0.01
        rng = np.random.default_rng(42)
        linear = []
        for _ in range(100):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            f = (1 + 0.5 * n[2]) / 2
            res = gleason.ResolutionOfIdentity(
                projectors=(gleason.bloch_projector(n), gleason.bloch_projector(-n))
            )
            linear.append(gleason.FrameSample(resolution=res, values=(f, 1 - f)))
        ok &= gleason.fit_density(linear).residual <= 1e-10
    _report(5, "d=2 necessity: cubic fails, linear control fits", ok, t.elapsed, 1.0)


def test_criterion_6_povm_contract():
    rng = np.random.default_rng(606)
    with _Timer() as t:
        ok = True
        for _ in range(100):
            ds = int(rng.integers(2, 5))
            dp = int(rng.integers(2, 5))
            basis = random_basis_atoms(dp, rng)
            model = AncillaModel(
                dS=ds, dP=dp, U=random_unitary(ds * dp, rng),
                rho_P=random_density(dp, rng), projectors_P=basis,
            )
            effects = povm.derive_povm(model)
            rep = povm.verify_povm(effects)
            ok &= rep.deviations["min_eigenvalue"] >= -1e-10
            ok &= rep.deviations["closure_deviation"] <= 1e-10
            worst = 0.0
            states = [random_density(ds, rng) for _ in range(100)]
            for rho_s in states:
                for b, e in enumerate(effects.effects):
                    worst = max(worst, abs(
                        float(np.trace(rho_s @ e).real)
                        - povm.joint_probability(rho_s, model, b)
                    ))
            ok &= worst <= 1e-10
    _report(6, "POVM contract, 100 ancilla models x 100 states", ok, t.elapsed, 10.0)


def _random_qubit_povm(n_outcomes, rng):
    raw = []
    for _ in range(n_outcomes):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        raw.append(a @ a.conj().T)
    total = sum(raw)
    lam, v = np.linalg.eigh(total)
    inv_sqrt = (v / np.sqrt(lam)) @ v.conj().T
    return EffectList(effects=tuple(inv_sqrt @ r @ inv_sqrt for r in raw))


def test_criterion_7_naimark_round_trip():
    rng = np.random.default_rng(707)
    with _Timer() as t:
        ok = True
        for _ in range(50):
            effects = _random_qubit_povm(3, rng)
            dil = povm.naimark_dilate(effects)
            rho = random_density(2, rng)
            for e, pb in zip(effects.effects, dil.projectors):
                direct = float(np.trace(rho @ e).real)
                lifted = float(np.trace(dil.isometry @ rho @ dil.isometry.conj().T @ pb).real)
                ok &= abs(direct - lifted) <= 1e-10
            u = povm.unitary_completion(dil.isometry)
            model = AncillaModel(
                dS=2, dP=3, U=u,
                rho_P=np.diag([1.0, 0, 0]).astype(complex),
                projectors_P=tuple(np.diag([float(i == k) for i in range(3)]).astype(complex)
                                   for k in range(3)),
            )
            recovered = povm.derive_povm(model)
            for got, want in zip(recovered.effects, effects.effects):
                ok &= float(np.max(np.abs(got - want))) <= 1e-9
    _report(7, "Naimark dilation round trip, 50 qubit POVMs", ok, t.elapsed, 5.0)


def test_criterion_8_dynamics_group_law():
    rng = np.random.default_rng(808)
    with _Timer() as t:
        ok = True
        for _ in range(20):
            d = int(rng.integers(2, 9))
            h = dynamics.Hamiltonian(random_hermitian(d, rng))
            times = list(rng.uniform(-2, 2, size=5))
            rep = dynamics.check_abelian_group(h, times)
            ok &= max(rep.deviations.values()) <= 1e-9
            # log round trip inside the principal branch
            radius = float(np.max(np.abs(np.linalg.eigvalsh(h.h))))
            t_small = 0.45 * np.pi / radius
            p = dynamics.propagator(h, t_small)
            back = dynamics.hamiltonian_log(p)
            ok &= float(np.max(np.abs(dynamics.propagator(back, t_small).u - p.u))) <= 1e-8
        # lattice relation tables invariant under conjugation
        qs = []
        for rank in (1, 2, 1, 3):
            v = random_unitary(4, rng)
            qs.append(Question(np.asarray(sum(ketbra(v[:, k]) for k in range(rank)))))
        p = dynamics.propagator(dynamics.Hamiltonian(random_hermitian(4, rng)), 0.6)
        evolved = [dynamics.evolve_question(q, p) for q in qs]
        before = lattice.relation_tables(qs)
        after = lattice.relation_tables(evolved)
        ok &= np.array_equal(before[0], after[0]) and np.array_equal(before[1], after[1])
    _report(8, "abelian group law + generator log + lattice invariance", ok, t.elapsed, 5.0)


def test_criterion_9_orthomodularity():
    with _Timer() as t:
        sample = [
            lattice.zero_question(2),
            lattice.sure_question(2),
            Question(ketbra(KET0), "z+"),
            Question(ketbra(KET1), "z-"),
            Question(ketbra(PLUS), "x+"),
            Question(ketbra(MINUS), "x-"),
        ]
        rep = lattice.check_orthomodular(sample)
        ok = rep.orthomodular
        triples = {(i, j, k) for i, j, k, _ in rep.distributivity_violations}
        ok &= (2, 4, 5) in triples  # (|0><0|, |+><+|, |-><-|)
    _report(9, "orthomodular law holds, distributivity fails on classic triple", ok, t.elapsed, 1.0)


def test_criterion_10_cli_determinism(tmp_path):
    fixtures = sorted(FIXTURE_DIR.glob("*.json"))
    assert fixtures, "no shipped scenario fixtures found"
    with _Timer() as t:
        ok = True
        for fixture in fixtures:
            a, b = tmp_path / "a.json", tmp_path / "b.json"
            ok &= cli_main(["run", str(fixture), "--out", str(a)]) == 0
            ok &= cli_main(["run", str(fixture), "--out", str(b)]) == 0
            ra = json.loads(a.read_text())
            rb = json.loads(b.read_text())
            ra.pop("timing_ms")
            rb.pop("timing_ms")
            ok &= json.dumps(ra, sort_keys=True) == json.dumps(rb, sort_keys=True)
    _report(10, f"CLI determinism over {len(fixtures)} fixtures", ok, t.elapsed, 60.0)
