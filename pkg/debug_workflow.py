"""
Debug script for stepping through the verification workflow without the CLI.

Run it under a debugger and set breakpoints in any check to inspect the
intermediate matrices and kernel values.
"""

import logging
import sys

from dotenv import load_dotenv

from verification.checks import check_ids_for_level
from verification.state import create_initial_state
from verification.workflow import NODES, route_after_check

# Load environment variables
load_dotenv()


def main(level: str = "quick"):
    """Run the verification checks one node at a time and print progress."""
    logging.basicConfig(level=logging.INFO, stream=sys.stderr)

    print("=" * 80)
    print("VERIFICATION DEBUG SESSION")
    print("=" * 80)

    state = create_initial_state(level, check_ids_for_level(level))
    print(f"\nLevel: {state['level']} (max n = {state['max_nodes']})")
    print(f"Checks: {', '.join(state['pending'])}\n")
    print("-" * 80)

    node = "run_check"
    step = 0
    while node != "summarize":
        step += 1
        update = NODES[node](state)
        state = {**state, **update}
        result = state["results"][-1]
        mark = "✓" if result["passed"] else "✗"
        print(f"[{step}] {mark} {result['name']}: margin {result['margin']:.3g}")
        print(f"      {result['detail']}")
        node = route_after_check(state)

    state = {**state, **NODES["summarize"](state)}
    print("-" * 80)
    print("All checks passed." if state["all_passed"] else "Some checks FAILED.")
    if state["errors"]:
        print("\nErrors:")
        for check_id, message in state["errors"].items():
            print(f"  - {check_id}: {message}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "quick")
