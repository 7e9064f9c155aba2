"""Desk-scale size guards for exponential enumerations.

The default limits keep subset enumerations, the permutation oracle, and the
core LP at sizes a laptop handles instantly.  Setting FLOWMECH_MAX_EDGES
overrides every guard at once for deliberately larger runs.
"""

from __future__ import annotations

import os

ENV_OVERRIDE = "FLOWMECH_MAX_EDGES"


class SizeGuardError(Exception):
    pass


def guard_size(what: str, n: int, default_limit: int) -> None:
    limit = default_limit
    raw = os.environ.get(ENV_OVERRIDE)
    if raw is not None:
        try:
            limit = int(raw)
        except ValueError:
            raise SizeGuardError(f"{ENV_OVERRIDE} must be an integer, got {raw!r}") from None
    if n > limit:
        raise SizeGuardError(
            f"{what}: size {n} exceeds the guard of {limit} "
            f"(set {ENV_OVERRIDE} to raise it)"
        )
