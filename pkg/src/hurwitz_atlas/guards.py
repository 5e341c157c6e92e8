"""Enumeration guards shared by the brute-force routines."""

import os

GUARD_ENV = "HURWITZ_ATLAS_GUARD_OVERRIDE"


class GuardError(ValueError):
    """Raised when an enumeration would exceed its size guard."""


def guards_lifted() -> bool:
    return os.environ.get(GUARD_ENV, "").strip().lower() in ("1", "true", "yes", "on")


def guard_exceeded(condition: bool) -> bool:
    return bool(condition) and not guards_lifted()
