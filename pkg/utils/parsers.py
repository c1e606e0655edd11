"""
Parsers for the command-line mini-languages.

Complex literals: `a+bi`, `a-bi`, `bi`, `a`, `i`, and `inf` for the point at
infinity (no parentheses, so they survive the shell unquoted).

Curve specs: `circle:cx=0,cy=0,r=1`, `ellipse:r=2`, `wedge:theta=0.785`,
optionally prefixed by one or more `mobius(a,b,c,d)*`. Family and parameter
names are case-sensitive; parameter values are decimal literals.
"""

import re
from typing import Any, Dict, Optional

from pydantic import ValidationError

from cauchy_szego.errors import DomainError, SpecParseError
from cauchy_szego.geometry import (
    INFINITY,
    Circle,
    Curve,
    Ellipse,
    MoebiusMap,
    ScalarPoint,
    WedgeBoundary,
    curve_pushforward,
    mobius_compose,
)
from config.families import CURVE_FAMILIES, get_family_by_id

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_REAL_RE = re.compile(rf"^[+-]?{_NUMBER}$")
_IMAG_RE = re.compile(rf"^(?P<im>[+-]?(?:{_NUMBER})?)i$")
_COMPLEX_RE = re.compile(rf"^(?P<re>[+-]?{_NUMBER})(?P<im>[+-](?:{_NUMBER})?)i$")
_MOBIUS_RE = re.compile(r"^mobius\((?P<coefs>[^()]*)\)\*(?P<rest>.+)$")
_CURVE_RE = re.compile(r"^(?P<family>[a-z]+)(?::(?P<params>.*))?$")


def _imag_part(text: str) -> float:
    if text in ("", "+"):
        return 1.0
    if text == "-":
        return -1.0
    return float(text)


def parse_complex(text: str) -> ScalarPoint:
    """
    Parse a complex literal or `inf`.

    Args:
        text: e.g. "0.2+0.1i", "-1e-3i", "3", "inf"

    Returns:
        A complex number, or INFINITY

    Raises:
        SpecParseError: If the literal is malformed

    Example:
        >>> parse_complex("1-2.5i")
        (1-2.5j)
    """
    s = text.strip().replace(" ", "")
    if s == "inf":
        return INFINITY
    if _REAL_RE.match(s):
        return complex(float(s), 0.0)
    match = _IMAG_RE.match(s)
    if match:
        return complex(0.0, _imag_part(match.group("im")))
    match = _COMPLEX_RE.match(s)
    if match:
        return complex(float(match.group("re")), _imag_part(match.group("im")))
    raise SpecParseError(f"Cannot parse complex literal {text!r}; expected a+bi, a-bi or inf.")


def parse_float_list(text: str, count: int, name: str) -> list:
    """Comma-separated decimals, exactly `count` of them (e.g. --box, --res)."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise SpecParseError(f"{name} needs {count} comma-separated values, got {text!r}.")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise SpecParseError(f"{name} has a non-numeric entry: {text!r}.")


def _parse_params(family: dict, text: Optional[str]) -> Dict[str, float]:
    allowed = dict(family["params"])
    values: Dict[str, float] = {}
    if text:
        for item in text.split(","):
            name, sep, raw = item.partition("=")
            name, raw = name.strip(), raw.strip()
            if not sep or not name:
                raise SpecParseError(f"Parameter {item!r} is not of the form name=value.")
            if name not in allowed:
                known = ", ".join(allowed)
                raise SpecParseError(
                    f"Unknown parameter {name!r} for {family['id']} (allowed: {known})."
                )
            if name in values:
                raise SpecParseError(f"Parameter {name!r} given twice.")
            if not _REAL_RE.match(raw):
                raise SpecParseError(f"Parameter {name}={raw!r} is not a decimal literal.")
            values[name] = float(raw)

    for name, default in family["params"]:
        if name not in values:
            if default is None:
                raise SpecParseError(f"Missing required parameter {name!r} for {family['id']}.")
            values[name] = default
    return values


def _make_curve(family_id: str, params: Dict[str, float]) -> Curve:
    try:
        if family_id == "circle":
            return Circle(center=complex(params["cx"], params["cy"]), radius=params["r"])
        if family_id == "ellipse":
            return Ellipse(r=params["r"])
        return WedgeBoundary(theta=params["theta"])
    except ValidationError as exc:
        first = exc.errors()[0]
        raise DomainError(f"Invalid {family_id} parameters: {first['msg']}.")


def parse_curve_spec(spec: str) -> Dict[str, Any]:
    """
    Parse a curve spec string.

    Args:
        spec: e.g. "ellipse:r=2" or "mobius(1,0.2,0,1)*circle:r=1"

    Returns:
        Dictionary with parsed fields:
        - family (str): the canonical family id
        - params (Dict[str, float]): parameters with defaults filled in
        - mobius (MoebiusMap or None): composed prefix maps, outermost first
        - curve (Curve): the canonical curve before any Möbius map

    Raises:
        SpecParseError: On unknown families, parameters or malformed text
        DomainError: If the parameters are outside the family's range
    """
    text = spec.strip()
    mobius: Optional[MoebiusMap] = None

    while True:
        match = _MOBIUS_RE.match(text)
        if not match:
            break
        coefs = [c.strip() for c in match.group("coefs").split(",")]
        if len(coefs) != 4:
            raise SpecParseError(f"mobius(...) needs four coefficients, got {len(coefs)}.")
        values = [parse_complex(c) for c in coefs]
        if any(v is INFINITY for v in values):
            raise SpecParseError("Möbius coefficients must be finite.")
        try:
            current = MoebiusMap(a=values[0], b=values[1], c=values[2], d=values[3])
        except ValidationError:
            raise DomainError(f"Möbius map {match.group('coefs')!r} is degenerate (ad - bc = 0).")
        mobius = current if mobius is None else mobius_compose(mobius, current)
        text = match.group("rest").strip()

    match = _CURVE_RE.match(text)
    if not match:
        raise SpecParseError(f"Cannot parse curve spec {spec!r}.")
    try:
        family = get_family_by_id(match.group("family"))
    except ValueError:
        known = ", ".join(f["id"] for f in CURVE_FAMILIES)
        raise SpecParseError(f"Unknown curve family {match.group('family')!r} (known: {known}).")

    params = _parse_params(family, match.group("params"))
    return {
        "family": family["id"],
        "params": params,
        "mobius": mobius,
        "curve": _make_curve(family["id"], params),
    }


def build_curve(parsed: Dict[str, Any], n: int) -> Curve:
    """
    The curve a parsed spec describes: the canonical curve, or its Möbius
    image sampled at n nodes.

    Raises:
        PoleError: If the Möbius pole lies on the curve
        UnboundedCurveError: For a Möbius image of the wedge
    """
    if parsed["mobius"] is None:
        return parsed["curve"]
    return curve_pushforward(parsed["mobius"], parsed["curve"], n)
