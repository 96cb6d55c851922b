"""Runtime toggles shared across modules."""

import os

# Redundant cross-checks (e.g. computing demonic composition two ways and
# comparing) are cheap at the carrier sizes this library targets, so they
# default to on.  Set RELIC_SELF_CHECK=0 to disable outside tests.
_SELF_CHECK = os.environ.get("RELIC_SELF_CHECK", "1") != "0"


def self_check_enabled() -> bool:
    return _SELF_CHECK


def set_self_check(on: bool) -> None:
    global _SELF_CHECK
    _SELF_CHECK = bool(on)


def default_budget() -> int:
    """Evaluation budget for exhaustive law sweeps (RELIC_BUDGET overrides)."""
    raw = os.environ.get("RELIC_BUDGET")
    if raw is None:
        return 100_000_000
    return int(raw)
