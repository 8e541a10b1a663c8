"""Scenario runner: load a declarative JSON scenario, dispatch to the
library, and write a machine-readable verification report.

Subcommands:
    bornlab run <scenario.json> [--out report.json] [--seed N] [--tol-override key=val]
    bornlab schema

Exit status: 0 when every verdict passes, 1 on verdict failure,
2 on parse errors, 3 on payload validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import born, dynamics, gleason, lattice, povm
from .config import DEFAULT, Tolerances
from .errors import BornlabError, ParseError, ValidationError
from .lattice import CompleteQuestionSet, Question
from .serialize import (
    FORMAT_VERSION,
    ancilla_model_from_json,
    dump_json,
    effect_list_from_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    question_from_json,
)

TOOL_VERSION = "0.1.0"

SCENARIO_KINDS = {
    "lattice-check": {
        "description": "orthomodularity and distributivity of a question set",
        "required": {"questions": "list of question records, or builtin: qubit-rank1"},
        "optional": {"require_nondistributive": "bool, verdict that a violation exists"},
    },
    "born-matrix": {
        "description": "exact transition matrix between two complete-question sets",
        "required": {"atoms_b": "list of matrices", "atoms_c": "list of matrices"},
        "optional": {"builtin": "mub-d2 replaces atoms_b/atoms_c"},
    },
    "born-sample": {
        "description": "Monte-Carlo outcome counts for a state and atom set",
        "required": {"rho": "matrix", "atoms": "list of matrices", "n": "int", "seed": "int"},
        "optional": {},
    },
    "gleason-fit": {
        "description": "forward-generate frame samples from a state and invert",
        "required": {"rho": "matrix", "n_resolutions": "int", "seed": "int"},
        "optional": {"max_residual": "float (default 1e-10)",
                     "max_recovery_error": "float (default 1e-8)"},
    },
    "gleason-counterexample": {
        "description": "cubic qubit frame function defeating the linear fit",
        "required": {"n_directions": "int", "seed": "int"},
        "optional": {"min_residual": "float (default 0.01)"},
    },
    "povm-derive": {
        "description": "effects from an ancilla model, checked against joint probabilities",
        "required": {"model": "ancilla model record {dS,dP,U,rho_P,projectors_P}"},
        "optional": {"n_test_states": "int (default 20)", "seed": "int (default 0)"},
    },
    "povm-dilate": {
        "description": "Naimark dilation of an effect list, statistics round trip",
        "required": {"effects": "list of matrices"},
        "optional": {"n_test_states": "int (default 20)", "seed": "int (default 0)"},
    },
    "dynamics-evolve": {
        "description": "propagate a question and/or state and check preserved structure",
        "required": {"h": "matrix (Hermitian)", "t": "float"},
        "optional": {"question": "question record", "rho": "matrix"},
    },
    "dynamics-group": {
        "description": "abelian group laws of the one-parameter propagator family",
        "required": {"h": "matrix (Hermitian)", "times": "list of floats"},
        "optional": {"max_deviation": "float (default 1e-9)"},
    },
}


@dataclass
class Report:
    scenario: dict
    verdicts: list[dict] = field(default_factory=list)
    outputs: dict = field(default_factory=dict)
    timing_ms: float = 0.0

    def verdict(self, name: str, passed: bool, deviation: float | None = None) -> None:
        entry = {"name": name, "passed": bool(passed)}
        if deviation is not None:
            entry["deviation"] = float(deviation)
        self.verdicts.append(entry)

    @property
    def all_passed(self) -> bool:
        return all(v["passed"] for v in self.verdicts)

    def to_json(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "tool_version": TOOL_VERSION,
            "scenario": self.scenario,
            "verdicts": self.verdicts,
            "outputs": self.outputs,
            "all_passed": self.all_passed,
            "timing_ms": self.timing_ms,
        }


def _require(payload: dict, kind: str, *names: str) -> None:
    for name in names:
        if name not in payload:
            raise ValidationError(f"{kind}: missing required field {name!r}")


def _random_density(d: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def _atoms(payload_list) -> CompleteQuestionSet:
    return CompleteQuestionSet(atoms=tuple(matrix_from_json(m) for m in payload_list))


def _qubit_rank1_sample() -> list[Question]:
    ket0 = np.array([1, 0], dtype=complex)
    ket1 = np.array([0, 1], dtype=complex)
    plus = (ket0 + ket1) / np.sqrt(2)
    minus = (ket0 - ket1) / np.sqrt(2)
    qs = [lattice.zero_question(2), lattice.sure_question(2)]
    for label, v in [("z+", ket0), ("z-", ket1), ("x+", plus), ("x-", minus)]:
        qs.append(Question(np.outer(v, v.conj()), label=label))
    return qs


def _mub_d2() -> tuple[CompleteQuestionSet, CompleteQuestionSet]:
    ket0 = np.array([1, 0], dtype=complex)
    ket1 = np.array([0, 1], dtype=complex)
    plus = (ket0 + ket1) / np.sqrt(2)
    minus = (ket0 - ket1) / np.sqrt(2)
    b = CompleteQuestionSet(atoms=(np.outer(ket0, ket0), np.outer(ket1, ket1)))
    c = CompleteQuestionSet(atoms=(np.outer(plus, plus.conj()), np.outer(minus, minus.conj())))
    return b, c


def _run_lattice_check(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    if payload.get("questions") == "builtin: qubit-rank1" or payload.get("builtin") == "qubit-rank1":
        questions = _qubit_rank1_sample()
    else:
        _require(payload, "lattice-check", "questions")
        questions = [question_from_json(q) for q in payload["questions"]]
    lat = lattice.check_orthomodular(questions, tol)
    report.verdict("closed_under_negation", lat.closed_under_negation)
    report.verdict("orthomodular_law", not lat.orthomodular_violations,
                   lat.max_orthomodular_deviation)
    report.outputs["comparable_pairs"] = lat.comparable_pairs
    report.outputs["distributivity_violations"] = len(lat.distributivity_violations)
    if payload.get("require_nondistributive"):
        report.verdict("nondistributive", bool(lat.distributivity_violations))


def _run_born_matrix(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    if payload.get("builtin") == "mub-d2":
        b, c = _mub_d2()
    else:
        _require(payload, "born-matrix", "atoms_b", "atoms_c")
        b, c = _atoms(payload["atoms_b"]), _atoms(payload["atoms_c"])
    t = born.transition_matrix(b, c, tol)
    check = born.verify_bistochastic(t, tol)
    report.verdict("range", check.deviations["range_violation"] <= tol.resolution,
                   check.deviations["range_violation"])
    report.verdict("column_sums", check.deviations["column_sum"] <= tol.resolution,
                   check.deviations["column_sum"])
    rows_ok = check.deviations["row_sum"] <= tol.resolution
    if rows_ok or (b.all_rank_one and c.all_rank_one):
        report.verdict("row_sums", rows_ok, check.deviations["row_sum"])
    else:
        report.outputs["row_sum_flag"] = check.messages
    report.outputs["matrix"] = [[float(x) for x in row] for row in t.p]


def _run_born_sample(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    _require(payload, "born-sample", "rho", "atoms", "n")
    rho = matrix_from_json(payload["rho"])
    atoms = _atoms(payload["atoms"])
    rec = born.sample_answers(rho, atoms, int(payload["n"]), seed, tol)
    report.verdict("counts_sum_to_n", sum(rec.counts.values()) == rec.n_trials)
    report.outputs["counts"] = {str(k): v for k, v in sorted(rec.counts.items())}
    report.outputs["n_trials"] = rec.n_trials


def _run_gleason_fit(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    _require(payload, "gleason-fit", "rho", "n_resolutions")
    rho = matrix_from_json(payload["rho"])
    d = rho.shape[0]
    rng = np.random.default_rng(seed)
    resolutions = [gleason.random_resolution(d, rng) for _ in range(int(payload["n_resolutions"]))]
    samples = gleason.frame_samples_from_state(rho, resolutions, tol)
    frame = gleason.check_frame_function(samples, tol)
    report.verdict("frame_function", frame.passed)
    fit = gleason.fit_density(samples)
    max_res = float(payload.get("max_residual", 1e-10))
    max_err = float(payload.get("max_recovery_error", 1e-8))
    err = float(np.linalg.norm(fit.rho_hat - rho))
    report.verdict("residual", fit.residual <= max_res, fit.residual)
    report.verdict("rank_complete", not fit.rank_deficient, float(fit.rank))
    report.verdict("recovery_error", err <= max_err, err)
    report.outputs["rho_hat"] = matrix_to_json(fit.rho_hat)
    report.outputs["trace_deviation"] = fit.trace_deviation
    report.outputs["psd_violation"] = fit.psd_violation


def _run_gleason_counterexample(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    _require(payload, "gleason-counterexample", "n_directions")
    samples = gleason.qubit_counterexample(int(payload["n_directions"]), seed)
    frame = gleason.check_frame_function(samples, tol)
    report.verdict("frame_function", frame.passed)
    fit = gleason.fit_density(samples)
    min_res = float(payload.get("min_residual", 0.01))
    report.verdict("nonlinear_residual", fit.residual >= min_res, fit.residual)
    report.outputs["residual"] = fit.residual


def _run_povm_derive(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    _require(payload, "povm-derive", "model")
    for key in ("dS", "dP", "U", "rho_P", "projectors_P"):
        if key not in payload["model"]:
            raise ValidationError(f"povm-derive: model lacks required field {key!r}")
    model = ancilla_model_from_json(payload["model"])
    effects = povm.derive_povm(model)
    check = povm.verify_povm(effects, tol)
    report.verdict("psd", check.deviations["min_eigenvalue"] >= tol.effect_psd,
                   check.deviations["min_eigenvalue"])
    report.verdict("closure", check.deviations["closure_deviation"] <= tol.effect_closure,
                   check.deviations["closure_deviation"])
    rng = np.random.default_rng(seed)
    n_states = int(payload.get("n_test_states", 20))
    worst = 0.0
    for _ in range(n_states):
        rho_s = _random_density(model.dS, rng)
        for b, e in enumerate(effects.effects):
            reduced = float(np.trace(rho_s @ e).real)
            joint = povm.joint_probability(rho_s, model, b, tol)
            worst = max(worst, abs(reduced - joint))
    report.verdict("probability_contract", worst <= 1e-10, worst)
    report.outputs["effects"] = [matrix_to_json(e) for e in effects.effects]


def _run_povm_dilate(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    _require(payload, "povm-dilate", "effects")
    effects = effect_list_from_json(payload["effects"])
    dil = povm.naimark_dilate(effects, tol)
    v = dil.isometry
    iso_dev = float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))
    report.verdict("isometry", iso_dev <= tol.unitary, iso_dev)
    rng = np.random.default_rng(seed)
    n_states = int(payload.get("n_test_states", 20))
    worst = 0.0
    for _ in range(n_states):
        rho = _random_density(effects.dim, rng)
        for e, pb in zip(effects.effects, dil.projectors):
            direct = float(np.trace(rho @ e).real)
            dilated = float(np.trace(v @ rho @ v.conj().T @ pb).real)
            worst = max(worst, abs(direct - dilated))
    report.verdict("statistics_match", worst <= 1e-10, worst)
    report.outputs["ancilla_dim"] = dil.ancilla_dim


def _run_dynamics_evolve(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    _require(payload, "dynamics-evolve", "h", "t")
    h = dynamics.Hamiltonian(matrix_from_json(payload["h"]))
    p = dynamics.propagator(h, float(payload["t"]), tol)
    uni_dev = float(np.max(np.abs(p.u.conj().T @ p.u - np.eye(p.dim))))
    report.verdict("propagator_unitary", uni_dev <= tol.unitary, uni_dev)
    if "question" in payload:
        q = question_from_json(payload["question"])
        out = dynamics.evolve_question(q, p)
        report.verdict("rank_preserved", out.rank == q.rank)
        report.outputs["question_out"] = matrix_to_json(out.projector)
    if "rho" in payload:
        rho = matrix_from_json(payload["rho"])
        out = dynamics.evolve_joint(rho, p, tol)
        spec_dev = float(np.max(np.abs(
            np.sort(np.linalg.eigvalsh(out)) - np.sort(np.linalg.eigvalsh(rho))
        )))
        report.verdict("spectrum_preserved", spec_dev <= 1e-10, spec_dev)
        report.outputs["rho_out"] = matrix_to_json(out)


def _run_dynamics_group(payload: dict, tol: Tolerances, seed: int, report: Report) -> None:
    _require(payload, "dynamics-group", "h", "times")
    h = dynamics.Hamiltonian(matrix_from_json(payload["h"]))
    times = [float(t) for t in payload["times"]]
    check = dynamics.check_abelian_group(h, times, tol)
    limit = float(payload.get("max_deviation", 1e-9))
    for name in ("composition", "commutation", "inverse"):
        report.verdict(name, check.deviations[name] <= limit, check.deviations[name])


_DISPATCH = {
    "lattice-check": _run_lattice_check,
    "born-matrix": _run_born_matrix,
    "born-sample": _run_born_sample,
    "gleason-fit": _run_gleason_fit,
    "gleason-counterexample": _run_gleason_counterexample,
    "povm-derive": _run_povm_derive,
    "povm-dilate": _run_povm_dilate,
    "dynamics-evolve": _run_dynamics_evolve,
    "dynamics-group": _run_dynamics_group,
}


def run_scenario(scenario: dict, seed_override: int | None = None,
                 tol_overrides: dict[str, float] | None = None) -> Report:
    if not isinstance(scenario, dict):
        raise ValidationError("scenario must be a JSON object")
    kind = scenario.get("kind")
    if kind not in _DISPATCH:
        raise ValidationError(
            f"unknown kind {kind!r}; expected one of {sorted(_DISPATCH)}"
        )
    tol = DEFAULT
    overrides = dict(scenario.get("tolerances", {}))
    overrides.update(tol_overrides or {})
    if overrides:
        try:
            tol = tol.override(**{k: float(v) for k, v in overrides.items()})
        except TypeError as exc:
            raise ValidationError(f"unknown tolerance override: {exc}") from exc
    seed = seed_override if seed_override is not None else int(scenario.get("seed", 0))
    echo = dict(scenario)
    echo["seed"] = seed
    report = Report(scenario=echo)
    start = time.perf_counter()
    try:
        _DISPATCH[kind](scenario, tol, seed, report)
    except (ParseError, ValidationError):
        raise
    except BornlabError as exc:
        raise ValidationError(f"{kind}: {exc}") from exc
    report.timing_ms = (time.perf_counter() - start) * 1000
    return report


def emit_schema() -> str:
    return json.dumps(
        {
            "format_version": FORMAT_VERSION,
            "tool_version": TOOL_VERSION,
            "common_fields": {
                "kind": "one of the scenario kinds",
                "seed": "optional integer, default 0",
                "tolerances": "optional map of Tolerances field overrides",
            },
            "kinds": SCENARIO_KINDS,
        },
        indent=2,
        sort_keys=True,
    )


def _parse_tol_overrides(pairs: list[str]) -> dict[str, float]:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ValidationError(f"--tol-override expects key=val, got {pair!r}")
        key, val = pair.split("=", 1)
        out[key] = float(val)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="bornlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a scenario file and write a report")
    runp.add_argument("scenario", help="path to a scenario JSON file")
    runp.add_argument("--out", help="report output path (default stdout)")
    runp.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    runp.add_argument("--tol-override", action="append", default=[],
                      metavar="KEY=VAL", help="override one tolerance field")
    sub.add_parser("schema", help="print the scenario schema")
    args = parser.parse_args(argv)

    if args.command == "schema":
        print(emit_schema())
        return 0

    try:
        scenario = load_json(args.scenario)
        report = run_scenario(
            scenario,
            seed_override=args.seed,
            tol_overrides=_parse_tol_overrides(args.tol_override),
        )
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 3
    payload = report.to_json()
    if args.out:
        dump_json(payload, args.out)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return 0 if report.all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
