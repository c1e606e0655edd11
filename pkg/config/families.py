"""
Registry of the canonical curve families understood by the curve-spec parser.

Each entry lists the parameters a spec string may set, with defaults, and
whether the family is a bounded curve.
"""


# Unified family registry for spec parsing and CLI help
# Parameters are (name, default) pairs; None means required
CURVE_FAMILIES = [
    {"id": "circle", "display": "Circle |z - c| = r", "bounded": True,
     "params": [("cx", 0.0), ("cy", 0.0), ("r", 1.0)]},
    {"id": "ellipse", "display": "Ellipse x²/r² + y² = 1", "bounded": True,
     "params": [("r", None)]},
    {"id": "wedge", "display": "Wedge boundary, rays at angles ±theta", "bounded": False,
     "params": [("theta", None)]},
]


def get_family_by_id(family_id: str) -> dict:
    """
    Get a curve family entry by its ID.

    Args:
        family_id: The family ID (e.g., "ellipse")

    Returns:
        Family config dict with display name, params and boundedness

    Raises:
        ValueError: If family_id not found
    """
    for family in CURVE_FAMILIES:
        if family["id"] == family_id:
            return family

    known = ", ".join(f["id"] for f in CURVE_FAMILIES)
    raise ValueError(f"Curve family '{family_id}' not found in CURVE_FAMILIES (known: {known})")
