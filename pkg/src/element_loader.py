"""
Element loader for TorusFunction and AlgebraElement JSON files.

TorusFunction:  {"coeffs": [{"k": int, "re": float, "im": float}, ...]}
AlgebraElement: {"theta": float, "sigma": float,
                 "terms": [{"n": int, "fn": <TorusFunction>}, ...], "meta": {...}}

Optional "convergents": ["p/q", ...] on an element fixes the continued-fraction
data of theta instead of recomputing it.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from .crossed_algebra import AlgebraElement, RotationParameter, Weight
from .errors import ParseError, RotationAlgebraError
from .torus_function import TorusFunction

logger = logging.getLogger(__name__)


def _read_json(file_path: str) -> Any:
    path = Path(file_path)
    if not path.exists():
        raise ParseError(f"File not found: {file_path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path.name}: {e.msg}", line=e.lineno) from e


def _number(value: Any, field: str, integral: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"expected a number, got {type(value).__name__}", field=field)
    if integral:
        if isinstance(value, float) and not value.is_integer():
            raise ParseError(f"expected an integer, got {value!r}", field=field)
        return int(value)
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {value!r}", field=field)
    return float(value)


def torus_function_from_dict(data: Any, field: str = "") -> TorusFunction:
    """
    Build a TorusFunction from its JSON form.

    Raises:
        ParseError: On missing keys, wrong types, unsorted or duplicate k
    """
    prefix = f"{field}." if field else ""
    if not isinstance(data, dict) or "coeffs" not in data:
        raise ParseError("expected an object with 'coeffs'", field=field or "<root>")
    entries = data["coeffs"]
    if not isinstance(entries, list):
        raise ParseError("expected a list", field=f"{prefix}coeffs")

    coeffs: Dict[int, complex] = {}
    last_k: Optional[int] = None
    for idx, entry in enumerate(entries):
        where = f"{prefix}coeffs[{idx}]"
        if not isinstance(entry, dict):
            raise ParseError("expected an object", field=where)
        missing = [key for key in ("k", "re", "im") if key not in entry]
        if missing:
            raise ParseError(f"missing fields {missing}", field=where)
        k = _number(entry["k"], f"{where}.k", integral=True)
        if last_k is not None and k <= last_k:
            raise ParseError(f"k={k} is duplicate or out of order", field=f"{where}.k")
        last_k = k
        coeffs[k] = complex(_number(entry["re"], f"{where}.re"), _number(entry["im"], f"{where}.im"))
    # Exact representation: no drop tolerance on load
    return TorusFunction.from_coeffs(coeffs, drop_tol=0.0)


def torus_function_to_dict(phi: TorusFunction) -> Dict[str, Any]:
    return {
        "coeffs": [
            {"k": int(k), "re": float(c.real), "im": float(c.imag)}
            for k, c in sorted(phi.coeffs.items())
        ]
    }


def element_from_dict(data: Any, convergents: Optional[List[str]] = None) -> Tuple[AlgebraElement, Dict[str, Any]]:
    """
    Build an AlgebraElement from its JSON form.

    Args:
        data: Parsed JSON object
        convergents: "p/q" list overriding the file's own

    Returns:
        (element, meta)

    Raises:
        ParseError: With the field path of the offending value
    """
    if not isinstance(data, dict):
        raise ParseError("expected an object", field="<root>")
    missing = [key for key in ("theta", "sigma", "terms") if key not in data]
    if missing:
        raise ParseError(f"missing fields {missing}", field="<root>")

    theta_value = _number(data["theta"], "theta")
    sigma_value = _number(data["sigma"], "sigma")
    try:
        theta = RotationParameter.from_strings(theta_value, convergents or data.get("convergents"))
        weight = Weight(sigma_value)
    except RotationAlgebraError as e:
        raise ParseError(str(e), field="theta/sigma") from e

    terms = data["terms"]
    if not isinstance(terms, list):
        raise ParseError("expected a list", field="terms")
    parsed: Dict[int, TorusFunction] = {}
    last_n: Optional[int] = None
    for idx, entry in enumerate(terms):
        where = f"terms[{idx}]"
        if not isinstance(entry, dict) or "n" not in entry or "fn" not in entry:
            raise ParseError("expected an object with 'n' and 'fn'", field=where)
        n = _number(entry["n"], f"{where}.n", integral=True)
        if last_n is not None and n <= last_n:
            raise ParseError(f"n={n} is duplicate or out of order", field=f"{where}.n")
        last_n = n
        parsed[n] = torus_function_from_dict(entry["fn"], field=f"{where}.fn")

    meta = data.get("meta", {})
    if not isinstance(meta, dict):
        raise ParseError("expected an object", field="meta")
    return AlgebraElement.from_terms(theta, weight, parsed), meta


def element_to_dict(F: AlgebraElement, meta: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    return {
        "theta": F.theta.theta,
        "sigma": F.weight.sigma,
        "convergents": [f"{p}/{q}" for p, q in F.theta.convergents],
        "terms": [{"n": int(n), "fn": torus_function_to_dict(F.terms[n])} for n in F.support],
        "meta": dict(meta or {}),
    }


def load_torus_function(file_path: str) -> TorusFunction:
    """
    Load a TorusFunction JSON file.

    Raises:
        ParseError: If the file is missing, malformed or invalid
    """
    fn = torus_function_from_dict(_read_json(file_path))
    logger.debug("Loaded %s: degree %d", file_path, fn.degree)
    return fn


def load_element(file_path: str, convergents: Optional[List[str]] = None) -> Tuple[AlgebraElement, Dict[str, Any]]:
    """
    Load an AlgebraElement JSON file.

    Returns:
        (element, meta)

    Raises:
        ParseError: If the file is missing, malformed or invalid
    """
    F, meta = element_from_dict(_read_json(file_path), convergents)
    logger.debug("Loaded %s: support %s", file_path, F.support)
    return F, meta


def dumps(data: Any) -> str:
    """Canonical JSON: sorted keys, round-trip floats, no NaN."""
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def save_json(data: Any, file_path: str):
    path = Path(file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(data))


def save_element(F: AlgebraElement, file_path: str, meta: Optional[Dict[str, Any]] = None):
    save_json(element_to_dict(F, meta), file_path)


def save_torus_function(phi: TorusFunction, file_path: str):
    save_json(torus_function_to_dict(phi), file_path)
