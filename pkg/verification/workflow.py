"""
Verification workflow.

Structure:
    START → run_check → [route_after_check?]
              ↑           ├─> run_check (checks pending)
              └───────────┘
                          └─> summarize → END

Nodes take the state and return a dict of updated fields; the runner merges
it, mirroring how the check results accumulate in a single summary.
"""

import logging
import time
from typing import Any, Dict, Literal

from cauchy_szego.errors import CauchySzegoError
from verification.checks import check_ids_for_level, get_check_by_id
from verification.state import VerifyLevel, VerifyState, create_initial_state

logger = logging.getLogger(__name__)


def run_check_node(state: VerifyState) -> dict:
    """
    Run the next pending check.

    Library errors raised by a check are recorded as a failed result rather
    than aborting the run.

    Args:
        state: Current verification state

    Returns:
        Dict with updated pending, results, node_history, errors and all_passed
    """
    check_id = state["pending"][0]
    check = get_check_by_id(check_id)
    errors = dict(state["errors"])

    started = time.perf_counter()
    try:
        result = check["run"](state["max_nodes"])
    except CauchySzegoError as exc:
        logger.error("Check %s raised %s: %s", check_id, type(exc).__name__, exc)
        errors[check_id] = f"{type(exc).__name__}: {exc}"
        result = {"name": check_id, "passed": False, "margin": float("nan"), "detail": errors[check_id]}
    elapsed = time.perf_counter() - started

    level = logging.INFO if result["passed"] else logging.WARNING
    logger.log(level, "%s %s (margin %.3g, %.2fs)", check_id,
               "passed" if result["passed"] else "FAILED", result["margin"], elapsed)

    return {
        "pending": state["pending"][1:],
        "results": state["results"] + [result],
        "node_history": state["node_history"] + [check_id],
        "errors": errors,
        "all_passed": state["all_passed"] and result["passed"],
    }


def summarize_node(state: VerifyState) -> dict:
    failed = [r["name"] for r in state["results"] if not r["passed"]]
    if failed:
        logger.warning("Verification failed: %s", ", ".join(failed))
    return {"complete": True}


def route_after_check(state: VerifyState) -> Literal["run_check", "summarize"]:
    """
    Routing logic after a check node.

    Returns:
        "run_check" - more checks pending
        "summarize" - all checks done
    """
    if state["pending"]:
        return "run_check"
    return "summarize"


NODES = {
    "run_check": run_check_node,
    "summarize": summarize_node,
}


def run_verification(level: VerifyLevel = "quick") -> VerifyState:
    """
    Run the invariant suite.

    Args:
        level: "quick" runs the fast checks with n <= 256; "full" adds the
               operator sandwich, Berezin, Möbius invariance and n = 512/1024
               refinement checks

    Returns:
        Final VerifyState; all_passed is True iff every check passed

    Example:
        >>> state = run_verification("quick")
        >>> state["all_passed"]
        True
    """
    if level not in ("quick", "full"):
        raise ValueError(f"Unknown verification level {level!r}; use 'quick' or 'full'.")
    state = create_initial_state(level, check_ids_for_level(level))
    logger.info("Running %d %s checks", len(state["pending"]), level)

    node = "run_check" if state["pending"] else "summarize"
    while True:
        state = {**state, **NODES[node](state)}
        if node == "summarize":
            return state
        node = route_after_check(state)


def summary(state: VerifyState) -> Dict[str, Any]:
    """Machine-readable summary for JSON output."""
    return {
        "level": state["level"],
        "passed": state["all_passed"],
        "checks": state["results"],
    }
