"""
State schema for the verification workflow.

The workflow walks an ordered list of checks. Each check node returns a dict
of updated fields which the runner merges into the state, so a check never
mutates the state it is given.
"""

from typing import Dict, List, Literal, TypedDict

VerifyLevel = Literal["quick", "full"]


class CheckResult(TypedDict):
    name: str
    passed: bool
    margin: float          # tolerance minus observed error; negative means failure
    detail: str


class VerifyState(TypedDict):
    """
    Progress of one verification run.

    pending holds check ids still to run, in order; results accumulate one
    CheckResult per finished check.
    """

    # ============================================================================
    # REQUEST
    # ============================================================================

    level: VerifyLevel
    max_nodes: int                           # Largest n any check may use

    # ============================================================================
    # PROGRESS
    # ============================================================================

    pending: List[str]
    results: List[CheckResult]
    node_history: List[str]                  # Check ids in execution order
    errors: Dict[str, str]                   # Check id -> unexpected exception text

    # ============================================================================
    # OUTCOME
    # ============================================================================

    all_passed: bool
    complete: bool


def create_initial_state(level: VerifyLevel, check_ids: List[str]) -> VerifyState:
    """
    Create an initial VerifyState.

    Args:
        level: "quick" (n <= 256) or "full" (n <= 1024)
        check_ids: Ids of the checks to run, in order

    Returns:
        A fully initialized VerifyState ready for run_verification
    """
    return {
        "level": level,
        "max_nodes": 256 if level == "quick" else 1024,
        "pending": list(check_ids),
        "results": [],
        "node_history": [],
        "errors": {},
        "all_passed": True,
        "complete": False,
    }
