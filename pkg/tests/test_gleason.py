import numpy as np
import pytest

from bornlab.errors import InvalidPOVM
from bornlab.gleason import (
    FrameSample,
    GleasonDensityEstimator,
    ResolutionOfIdentity,
    bloch_projector,
    check_frame_function,
    fit_density,
    fit_density_povm,
    frame_samples_from_state,
    hermitian_basis,
    noncontextuality_check,
    qubit_counterexample,
    random_resolution,
)
from bornlab.povm import EffectList

from conftest import KET0, ketbra, random_density


def _state_samples(rho, n_res, seed):
    rng = np.random.default_rng(seed)
    d = rho.shape[0]
    return frame_samples_from_state(rho, [random_resolution(d, rng) for _ in range(n_res)])


class TestHermitianBasis:
    @pytest.mark.parametrize("d", [2, 3, 4, 6])
    def test_orthonormal_and_complete(self, d):
        basis = hermitian_basis(d)
        assert len(basis) == d * d
        for i, a in enumerate(basis):
            assert np.max(np.abs(a - a.conj().T)) < 1e-14
            for j, b in enumerate(basis):
                want = 1.0 if i == j else 0.0
                assert np.trace(a @ b).real == pytest.approx(want, abs=1e-12)


class TestForwardGeneration:
    def test_maximally_mixed(self, rng):
        samples = frame_samples_from_state(np.eye(3) / 3, [random_resolution(3, rng)])
        assert np.allclose(samples[0].values, 1 / 3)

    def test_diagonal(self):
        rho = np.diag([1 / 2, 1 / 3, 1 / 6]).astype(complex)
        res = ResolutionOfIdentity(
            projectors=tuple(np.diag([float(i == k) for i in range(3)]).astype(complex)
                             for k in range(3))
        )
        samples = frame_samples_from_state(rho, [res])
        assert samples[0].values == pytest.approx((1 / 2, 1 / 3, 1 / 6))

    def test_sixty_random_resolutions_valid(self, rng):
        rho = random_density(3, rng)
        samples = frame_samples_from_state(
            rho, [random_resolution(3, rng) for _ in range(60)]
        )
        assert check_frame_function(samples).passed


class TestFrameChecks:
    def test_generated_samples_pass(self, rng):
        assert check_frame_function(_state_samples(random_density(3, rng), 10, 3)).passed

    def test_perturbed_sum_located(self, rng):
        s = _state_samples(random_density(3, rng), 2, 4)
        vals = list(s[0].values)
        vals[0] += 0.05
        broken = FrameSample.__new__(FrameSample)
        object.__setattr__(broken, "resolution", s[0].resolution)
        object.__setattr__(broken, "values", tuple(vals))
        object.__setattr__(broken, "tol", s[0].tol)
        report = check_frame_function([broken, s[1]])
        assert not report.passed
        assert any("sum" in m for m in report.messages)

    def test_counterexample_is_valid_frame_function(self):
        assert check_frame_function(qubit_counterexample(50, 0)).passed


class TestNoncontextuality:
    def _shared_projector_samples(self, value_b):
        p = ketbra(KET0)
        comp = ResolutionOfIdentity(projectors=(p, np.diag([0.0, 1]).astype(complex)))
        samples = [FrameSample(resolution=comp, values=(0.3, 0.7))]
        broken = FrameSample.__new__(FrameSample)
        object.__setattr__(broken, "resolution", comp)
        object.__setattr__(broken, "values", (value_b, 1 - value_b))
        object.__setattr__(broken, "tol", samples[0].tol)
        samples.append(broken)
        return samples

    def test_agreement_exact_from_state(self, rng):
        rho = random_density(2, rng)
        comp = ResolutionOfIdentity(projectors=(ketbra(KET0), np.diag([0.0, 1]).astype(complex)))
        samples = frame_samples_from_state(rho, [comp, comp])
        assert noncontextuality_check(samples).passed

    def test_conflict_reported(self):
        report = noncontextuality_check(self._shared_projector_samples(0.4))
        assert not report.passed
        assert report.deviations["max_shared_value_gap"] == pytest.approx(0.1)

    def test_many_random_shared_pairs(self, rng):
        rho = random_density(3, rng)
        resolutions = []
        for _ in range(100):
            r = random_resolution(3, rng)
            resolutions.extend([r, r])
        samples = frame_samples_from_state(rho, resolutions)
        assert noncontextuality_check(samples).passed


class TestFitDensity:
    def test_round_trip_diagonal_d3(self):
        rho = np.diag([1 / 2, 1 / 3, 1 / 6]).astype(complex)
        fit = fit_density(_state_samples(rho, 20, 11))
        assert np.linalg.norm(fit.rho_hat - rho) < 1e-8
        assert fit.residual < 1e-10
        assert not fit.rank_deficient

    def test_single_resolution_rank_deficient(self):
        rho = np.diag([1 / 2, 1 / 3, 1 / 6]).astype(complex)
        res = ResolutionOfIdentity(
            projectors=tuple(np.diag([float(i == k) for i in range(3)]).astype(complex)
                             for k in range(3))
        )
        fit = fit_density(frame_samples_from_state(rho, [res]))
        assert fit.rank_deficient
        assert fit.residual < 1e-10  # consistent system even when underdetermined

    def test_round_trip_random_d4(self, rng):
        rho = random_density(4, rng)
        fit = fit_density(_state_samples(rho, 40, 13))
        assert np.linalg.norm(fit.rho_hat - rho) < 1e-8

    def test_uniqueness_on_disjoint_halves(self, rng):
        rho = random_density(3, rng)
        samples = _state_samples(rho, 40, 21)
        fit_a = fit_density(samples[:20])
        fit_b = fit_density(samples[20:])
        assert not fit_a.rank_deficient and not fit_b.rank_deficient
        assert np.max(np.abs(fit_a.rho_hat - fit_b.rho_hat)) < 1e-7


class TestQubitCounterexample:
    def test_axis_values(self):
        # n = z gives (1, 0); n = x gives (1/2, 1/2)
        assert np.allclose(bloch_projector([0, 0, 1.0]), ketbra(KET0))
        f_z = (1 + 1.0**3) / 2
        f_x = (1 + 0.0**3) / 2
        assert f_z == 1.0 and f_x == 0.5

    def test_frame_checks_pass(self):
        assert check_frame_function(qubit_counterexample(100, 42)).passed

    def test_nonlinear_vs_linear_control(self):
        fit_bad = fit_density(qubit_counterexample(100, 42))
        assert fit_bad.residual >= 0.01
        # linear control f = (1 + 0.5 nz)/2 is exactly the state (I + 0.5 sz)/2
        rng = np.random.default_rng(42)
        samples = []
        for _ in range(100):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            f = (1 + 0.5 * n[2]) / 2
            res = ResolutionOfIdentity(projectors=(bloch_projector(n), bloch_projector(-n)))
            samples.append(FrameSample(resolution=res, values=(f, 1 - f)))
        fit_good = fit_density(samples)
        assert fit_good.residual <= 1e-10
        want = np.diag([0.75, 0.25]).astype(complex)
        assert np.max(np.abs(fit_good.rho_hat - want)) < 1e-8

    def test_too_few_directions(self):
        with pytest.raises(ValueError):
            qubit_counterexample(5, 0)


def _tetrahedral_povm():
    vs = [
        np.array([0, 0, 1.0]),
        np.array([2 * np.sqrt(2) / 3, 0, -1 / 3]),
        np.array([-np.sqrt(2) / 3, np.sqrt(2 / 3), -1 / 3]),
        np.array([-np.sqrt(2) / 3, -np.sqrt(2 / 3), -1 / 3]),
    ]
    return EffectList(effects=tuple(0.5 * bloch_projector(v) for v in vs))


class TestFitDensityPovm:
    def test_trivial_povm_rank_deficient(self):
        e = EffectList(effects=(np.eye(2) / 2, np.eye(2) / 2))
        fit = fit_density_povm([(e, [0.5, 0.5])])
        assert fit.rank_deficient

    def test_tetrahedral_round_trip(self, rng):
        rho = random_density(2, rng)
        povm = _tetrahedral_povm()
        values = [float(np.trace(rho @ e).real) for e in povm.effects]
        fit = fit_density_povm([(povm, values)])
        assert np.linalg.norm(fit.rho_hat - rho) < 1e-8

    def test_consistent_with_projective_fit(self, rng):
        rho = random_density(2, rng)
        proj_samples = _state_samples(rho, 10, 31)
        fit_proj = fit_density(proj_samples)
        povm = _tetrahedral_povm()
        values = [float(np.trace(rho @ e).real) for e in povm.effects]
        mixed = [(povm, values)] + [
            (EffectList(effects=s.resolution.projectors), list(s.values))
            for s in proj_samples
        ]
        fit_mixed = fit_density_povm(mixed)
        assert np.max(np.abs(fit_mixed.rho_hat - fit_proj.rho_hat)) < 1e-8

    def test_invalid_povm_rejected(self):
        with pytest.raises(InvalidPOVM):
            EffectList(effects=(np.eye(2) * 0.4, np.eye(2) * 0.5))


class TestEstimatorApi:
    def test_fit_predict(self, rng):
        rho = random_density(3, rng)
        est = GleasonDensityEstimator().fit(_state_samples(rho, 20, 51))
        assert np.linalg.norm(est.rho_ - rho) < 1e-8
        probs = est.predict([np.diag([1.0, 0, 0]), np.diag([0.0, 1, 0])])
        assert probs[0] == pytest.approx(rho[0, 0].real, abs=1e-8)

    def test_get_params(self):
        est = GleasonDensityEstimator(effect_mode=True)
        assert est.get_params() == {"effect_mode": True}
        est.set_params(effect_mode=False)
        assert not est.effect_mode

    def test_unfitted_predict_raises(self):
        with pytest.raises(RuntimeError):
            GleasonDensityEstimator().predict([np.eye(2)])

    def test_effect_mode(self, rng):
        rho = random_density(2, rng)
        povm = _tetrahedral_povm()
        values = [float(np.trace(rho @ e).real) for e in povm.effects]
        est = GleasonDensityEstimator(effect_mode=True).fit([(povm, values)])
        assert np.linalg.norm(est.rho_ - rho) < 1e-8
