"""JSON document schemas for phases, polynomials, matrices, programs, reports.

Documents are dicts with a "kind" discriminator and schema_version 1;
numbers are serialized as Python floats (shortest round-trip decimals), so
parse(serialize(doc)) is bit-exact for finite values.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ArgumentError
from .poly import ComplexPoly
from .qsp import PhaseList, as_phase_list
from .qsvt import Projector, QsvtProgram

SCHEMA_VERSION = 1

KINDS = ("phases", "poly", "matrix", "program", "report")


def phases_document(phases) -> dict:
    p = as_phase_list(phases)
    return {
        "kind": "phases",
        "phases": [float(v) for v in p.phases],
        "schema_version": SCHEMA_VERSION,
    }


def poly_document(p: ComplexPoly) -> dict:
    doc = {
        "kind": "poly",
        "real": [float(v) for v in p.coeffs.real],
        "schema_version": SCHEMA_VERSION,
    }
    if np.any(p.coeffs.imag != 0.0):
        doc["imag"] = [float(v) for v in p.coeffs.imag]
    return doc


def matrix_document(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ArgumentError("matrix documents require a 2-d array")
    return {
        "kind": "matrix",
        "dim": [int(m.shape[0]), int(m.shape[1])],
        "re": [[float(v) for v in row] for row in m.real],
        "im": [[float(v) for v in row] for row in m.imag],
        "schema_version": SCHEMA_VERSION,
    }


def program_document(prog: QsvtProgram) -> dict:
    return {
        "kind": "program",
        "phases": [float(v) for v in prog.phases.phases],
        "left": matrix_document(prog.left.matrix),
        "right": matrix_document(prog.right.matrix),
        "oracle": None if prog.oracle is None else matrix_document(prog.oracle),
        "schema_version": SCHEMA_VERSION,
    }


def report_document(report_type: str, data: dict) -> dict:
    return {
        "kind": "report",
        "report_type": report_type,
        "data": data,
        "schema_version": SCHEMA_VERSION,
    }


def serialize(doc: dict) -> str:
    if doc.get("kind") not in KINDS:
        raise ArgumentError(f"unknown document kind {doc.get('kind')!r}")
    return json.dumps(doc, indent=2, sort_keys=False)


def parse(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("kind") not in KINDS:
        raise ArgumentError("document must be an object with a known 'kind'")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ArgumentError(f"unsupported schema_version {doc.get('schema_version')!r}")
    return doc


# typed accessors -----------------------------------------------------------


def to_phase_list(doc: dict) -> PhaseList:
    if doc.get("kind") != "phases":
        raise ArgumentError(f"expected a phases document, got {doc.get('kind')!r}")
    return PhaseList(np.asarray(doc["phases"], dtype=float))


def to_poly(doc: dict) -> ComplexPoly:
    if doc.get("kind") != "poly":
        raise ArgumentError(f"expected a poly document, got {doc.get('kind')!r}")
    real = np.asarray(doc["real"], dtype=float)
    imag = np.asarray(doc.get("imag", np.zeros_like(real)), dtype=float)
    if real.shape != imag.shape:
        raise ArgumentError("real and imag coefficient lists must have equal length")
    return ComplexPoly(real + 1j * imag)


def to_matrix(doc: dict) -> np.ndarray:
    if doc.get("kind") != "matrix":
        raise ArgumentError(f"expected a matrix document, got {doc.get('kind')!r}")
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc["im"], dtype=float)
    if list(re.shape) != list(doc["dim"]) or re.shape != im.shape:
        raise ArgumentError("matrix dimensions disagree with payload")
    return re + 1j * im


def to_program(doc: dict) -> QsvtProgram:
    if doc.get("kind") != "program":
        raise ArgumentError(f"expected a program document, got {doc.get('kind')!r}")
    oracle = doc.get("oracle")
    return QsvtProgram(
        phases=PhaseList(np.asarray(doc["phases"], dtype=float)),
        left=Projector(to_matrix(doc["left"])),
        right=Projector(to_matrix(doc["right"])),
        oracle=None if oracle is None else to_matrix(oracle),
    )
