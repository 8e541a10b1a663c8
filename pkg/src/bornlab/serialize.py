"""JSON (de)serialization shared by the library and the CLI.

Complex matrices are nested arrays of [re, im] pairs, row-major. The same
helpers back matrix files, question/family files, frame samples, ancilla
models, and CLI reports, so fixtures are diffable and reusable.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ParseError
from .gleason import FrameSample, ResolutionOfIdentity
from .lattice import Question, QuestionFamily
from .povm import AncillaModel, EffectList

FORMAT_VERSION = "1"

__all__ = [
    "FORMAT_VERSION",
    "matrix_to_json",
    "matrix_from_json",
    "question_to_json",
    "question_from_json",
    "family_to_json",
    "family_from_json",
    "frame_samples_to_json",
    "frame_samples_from_json",
    "ancilla_model_from_json",
    "effect_list_from_json",
    "load_json",
    "dump_json",
]


def matrix_to_json(m) -> list:
    a = np.asarray(m, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def matrix_from_json(obj) -> np.ndarray:
    try:
        a = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"matrix entries must be numeric: {exc}") from exc
    if a.ndim == 2:
        # plain real matrix shorthand
        return a.astype(complex)
    if a.ndim == 3 and a.shape[2] == 2:
        return a[..., 0] + 1j * a[..., 1]
    raise ParseError(f"matrix must be nested rows of [re, im] pairs, got shape {a.shape}")


def question_to_json(q: Question) -> dict:
    return {"label": q.label, "projector": matrix_to_json(q.projector)}


def question_from_json(obj: dict) -> Question:
    if "projector" not in obj:
        raise ParseError("question record lacks 'projector'")
    return Question(matrix_from_json(obj["projector"]), label=str(obj.get("label", "")))


def family_to_json(f: QuestionFamily) -> dict:
    return {"dim": f.dim, "questions": [question_to_json(q) for q in f.questions]}


def family_from_json(obj: dict) -> QuestionFamily:
    if "questions" not in obj:
        raise ParseError("family record lacks 'questions'")
    return QuestionFamily(questions=tuple(question_from_json(q) for q in obj["questions"]))


def frame_samples_to_json(samples: list[FrameSample]) -> list:
    return [
        {
            "projectors": [matrix_to_json(p) for p in s.resolution.projectors],
            "values": list(s.values),
        }
        for s in samples
    ]


def frame_samples_from_json(obj: list) -> list[FrameSample]:
    out = []
    for rec in obj:
        res = ResolutionOfIdentity(
            projectors=tuple(matrix_from_json(p) for p in rec["projectors"])
        )
        out.append(FrameSample(resolution=res, values=tuple(rec["values"])))
    return out


def ancilla_model_from_json(obj: dict) -> AncillaModel:
    for key in ("dS", "dP", "U", "rho_P", "projectors_P"):
        if key not in obj:
            raise ParseError(f"ancilla model lacks {key!r}")
    return AncillaModel(
        dS=int(obj["dS"]),
        dP=int(obj["dP"]),
        U=matrix_from_json(obj["U"]),
        rho_P=matrix_from_json(obj["rho_P"]),
        projectors_P=tuple(matrix_from_json(p) for p in obj["projectors_P"]),
    )


def effect_list_from_json(obj: list) -> EffectList:
    return EffectList(effects=tuple(matrix_from_json(e) for e in obj))


def load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def dump_json(obj, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
