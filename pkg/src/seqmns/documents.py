"""JSON scenario documents.

A document is a single JSON object::

    {
      "alice_dim": 2,
      "bob_dim": 2,
      "state": [[[re, im], ...], ...],
      "alice_povm": [matrix, ...],
      "bob_povm": [matrix, ...],
      "post_unitaries": [matrix, ...]      (optional)
    }

Matrices are row-major nested lists whose entries are ``[re, im]`` pairs.
A bare number is accepted as a real entry. A POVM-only document
(``{"povm": [...]}``) is understood by :func:`povm_from_document`, and
JSON reports carrying a ``"scenario"`` object are read through it.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DimensionError, SeqMnsError
from .quantum import DensityMatrix, Povm, Scenario, validate_povm


class DocumentError(SeqMnsError, ValueError):
    pass


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj: Any, what: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise DocumentError(f"{what}: expected a non-empty list of rows")
    width = len(obj[0])
    out = np.empty((len(obj), width), dtype=np.complex128)
    for i, row in enumerate(obj):
        if len(row) != width:
            raise DocumentError(f"{what}: row {i} has {len(row)} entries, expected {width}")
        for j, entry in enumerate(row):
            out[i, j] = _decode_entry(entry, f"{what}[{i}][{j}]")
    return out


def _decode_entry(entry: Any, where: str) -> complex:
    if isinstance(entry, bool):
        raise DocumentError(f"{where}: not a number")
    if isinstance(entry, (int, float)):
        return complex(entry)
    if (
        isinstance(entry, list)
        and len(entry) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        return complex(entry[0], entry[1])
    raise DocumentError(f"{where}: expected [re, im], got {entry!r}")


def _decode_matrices(obj: Any, what: str) -> list[np.ndarray]:
    if not isinstance(obj, list) or not obj:
        raise DocumentError(f"{what}: expected a non-empty list of matrices")
    return [decode_matrix(m, f"{what}[{i}]") for i, m in enumerate(obj)]


def scenario_to_document(s: Scenario) -> dict:
    doc = {
        "alice_dim": s.alice_dim,
        "bob_dim": s.bob_dim,
        "state": encode_matrix(s.state.matrix),
        "alice_povm": [encode_matrix(e) for e in s.alice_povm],
        "bob_povm": [encode_matrix(e) for e in s.bob_povm],
    }
    if s.post_unitaries is not None:
        doc["post_unitaries"] = [encode_matrix(u) for u in s.post_unitaries]
    return doc


def _unwrap(doc: Any) -> dict:
    """Accept reports (demo/witness/optimize JSON) that nest the scenario."""
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    inner = doc.get("scenario")
    return inner if isinstance(inner, dict) else doc


def scenario_from_document(doc: Any, tol: float | None = None) -> Scenario:
    doc = _unwrap(doc)
    missing = [k for k in ("alice_dim", "bob_dim", "state", "alice_povm", "bob_povm") if k not in doc]
    if missing:
        raise DocumentError(f"missing field(s): {', '.join(missing)}")
    kw = {} if tol is None else {"tol": tol}
    da, db = doc["alice_dim"], doc["bob_dim"]
    if not all(isinstance(x, int) and not isinstance(x, bool) and x > 0 for x in (da, db)):
        raise DocumentError("alice_dim and bob_dim must be positive integers")
    state = DensityMatrix(decode_matrix(doc["state"], "state"), **kw)
    alice = validate_povm(_decode_matrices(doc["alice_povm"], "alice_povm"), **kw)
    bob = validate_povm(_decode_matrices(doc["bob_povm"], "bob_povm"), **kw)
    if alice.dim != da or bob.dim != db:
        raise DimensionError(
            f"POVM dimensions ({alice.dim}, {bob.dim}) disagree with declared ({da}, {db})"
        )
    unitaries = None
    if doc.get("post_unitaries") is not None:
        unitaries = tuple(_decode_matrices(doc["post_unitaries"], "post_unitaries"))
    return Scenario(state, alice, bob, unitaries, **kw)


def povm_from_document(doc: Any, tol: float | None = None) -> Povm:
    """The ``povm`` field, or Alice's POVM of a scenario document."""
    doc = _unwrap(doc)
    for key in ("povm", "alice_povm"):
        if key in doc:
            mats = _decode_matrices(doc[key], key)
            return validate_povm(mats) if tol is None else validate_povm(mats, tol)
    raise DocumentError("document has neither a 'povm' nor an 'alice_povm' field")


def povm_to_document(p: Povm) -> dict:
    return {"povm": [encode_matrix(e) for e in p]}


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def load_scenario(path: str | Path, tol: float | None = None) -> Scenario:
    return scenario_from_document(read_json(path), tol)
