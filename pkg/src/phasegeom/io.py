"""JSON input documents and report serialisation.

Input schemas::

    matrix      {"rows": [[...], ...]}
    covariance  {"rows": [[...], ...], "hbar": 1.0}            # hbar optional
    loop        {"n": k, "samples": [[x..., p...], ...]}        # last row repeats the first
                {"n": k, "fourier": {"cos": [[...], ...], "sin": [[...], ...]}}
    system      {"quadratic": {"M": [[...], ...]}, "z0": [...]}
                {"potential": {"kind": "pendulum", "params": {...}, "mass": 1.0}, "z0": [x, p]}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """Malformed input document; the message carries the location."""


def load_json(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top-level value must be a JSON object")
    return doc


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number, got {json.dumps(value)}")
    return float(value)


def parse_rows(rows, where: str = "rows") -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise InputError(f"{where}: expected a non-empty list of rows")
    out = []
    width = None
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise InputError(f"{where}[{i}]: expected a list of numbers")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputError(f"{where}[{i}]: has {len(row)} entries, expected {width}")
        out.append([_number(v, f"{where}[{i}][{k}]") for k, v in enumerate(row)])
    return np.array(out, dtype=float)


def parse_vector(values, where: str) -> np.ndarray:
    if not isinstance(values, list) or not values:
        raise InputError(f"{where}: expected a non-empty list of numbers")
    return np.array([_number(v, f"{where}[{k}]") for k, v in enumerate(values)])


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise InputError(f"{where}: missing field {key!r}")
    return doc[key]


def read_matrix(path) -> np.ndarray:
    doc = load_json(path)
    return _square(parse_rows(_require(doc, "rows", str(path)), f"{path}: rows"), path)


def _square(M: np.ndarray, path) -> np.ndarray:
    if M.shape[0] != M.shape[1]:
        raise InputError(f"{path}: matrix is {M.shape[0]}x{M.shape[1]}, expected square")
    return M


def read_covariance(path) -> tuple[np.ndarray, float | None]:
    doc = load_json(path)
    M = _square(parse_rows(_require(doc, "rows", str(path)), f"{path}: rows"), path)
    hbar = doc.get("hbar")
    if hbar is not None:
        hbar = _number(hbar, f"{path}: hbar")
    return M, hbar


def read_loop(path, samples: int = 1024):
    """Return a :class:`phasegeom.loops.Loop`; ``samples`` applies to Fourier loops only."""
    from .loops import Loop

    doc = load_json(path)
    where = str(path)
    n = _require(doc, "n", where)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InputError(f"{where}: n must be a positive integer")
    if "samples" in doc:
        z = parse_rows(doc["samples"], f"{where}: samples")
        if z.shape[1] != 2 * n:
            raise InputError(f"{where}: samples have {z.shape[1]} columns, expected {2 * n}")
        try:
            return Loop.from_closed_samples(z)
        except ValueError as exc:
            raise InputError(f"{where}: {exc}") from exc
    if "fourier" in doc:
        f = doc["fourier"]
        if not isinstance(f, dict):
            raise InputError(f"{where}: fourier must be an object with 'cos' and 'sin'")
        a = parse_rows(_require(f, "cos", f"{where}: fourier"), f"{where}: fourier.cos")
        b = parse_rows(_require(f, "sin", f"{where}: fourier"), f"{where}: fourier.sin")
        if a.shape != b.shape or a.shape[1] != 2 * n:
            raise InputError(f"{where}: fourier.cos and fourier.sin must both be (K+1) x {2 * n}")
        try:
            return Loop.from_fourier(a, b, samples)
        except ValueError as exc:
            raise InputError(f"{where}: {exc}") from exc
    raise InputError(f"{where}: loop needs either 'samples' or 'fourier'")


def read_system(path) -> dict:
    """Parse a system document into ``{"kind": "quadratic"|"potential", ...}``."""
    doc = load_json(path)
    where = str(path)
    z0 = doc.get("z0")
    if "quadratic" in doc:
        q = doc["quadratic"]
        if not isinstance(q, dict):
            raise InputError(f"{where}: quadratic must be an object with field 'M'")
        M = _square(parse_rows(_require(q, "M", f"{where}: quadratic"), f"{where}: quadratic.M"), path)
        if M.shape[0] % 2:
            raise InputError(f"{where}: quadratic.M has odd size {M.shape[0]}")
        z = np.eye(M.shape[0])[0] if z0 is None else parse_vector(z0, f"{where}: z0")
        if z.shape[0] != M.shape[0]:
            raise InputError(f"{where}: z0 has length {z.shape[0]}, expected {M.shape[0]}")
        return {"kind": "quadratic", "M": M, "z0": z}
    if "potential" in doc:
        p = doc["potential"]
        if not isinstance(p, dict):
            raise InputError(f"{where}: potential must be an object")
        kind = _require(p, "kind", f"{where}: potential")
        params = p.get("params", {})
        if not isinstance(params, dict):
            raise InputError(f"{where}: potential.params must be an object")
        params = {k: _number(v, f"{where}: potential.params.{k}") for k, v in params.items()}
        mass = _number(p.get("mass", 1.0), f"{where}: potential.mass")
        z = np.array([1.0, 0.0]) if z0 is None else parse_vector(z0, f"{where}: z0")
        if z.shape[0] != 2:
            raise InputError(f"{where}: z0 must be [x, p] for a potential system")
        return {"kind": "potential", "potential": kind, "params": params, "mass": mass, "z0": z}
    raise InputError(f"{where}: system needs either 'quadratic' or 'potential'")


def to_jsonable(obj):
    """Convert numpy scalars and arrays (recursively) to plain Python values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(report: dict) -> str:
    """Canonical machine-readable form: sorted keys, shortest round-trip floats."""
    return json.dumps(to_jsonable(report), indent=2, sort_keys=True, allow_nan=False) + "\n"


def matrix_document(M) -> dict:
    return {"rows": to_jsonable(np.asarray(M, dtype=float))}
