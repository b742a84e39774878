"""Shared exception types and cooperative deadlines."""

from __future__ import annotations

import time


class CapExceeded(ValueError):
    """A configured size cap (group order, matrix dimension) was exceeded."""


class AxiomFailure(ValueError):
    """A structural axiom check failed; carries the failure report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class DeadlineExceeded(RuntimeError):
    """A cooperative deadline ran out during a long search."""


class Deadline:
    """Wall-clock budget checked cooperatively inside search loops."""

    def __init__(self, ms: float | None):
        self.expiry = None if ms is None else time.monotonic() + ms / 1000.0

    def check(self) -> None:
        if self.expiry is not None and time.monotonic() > self.expiry:
            raise DeadlineExceeded("deadline expired")

    @property
    def expired(self) -> bool:
        return self.expiry is not None and time.monotonic() > self.expiry


NO_DEADLINE = Deadline(None)

# Default caps; every operation that enforces one takes an override argument.
MAX_ORDER = 512          # generator-closure and constructed-group cap
MAX_COHOMOLOGY_ORDER = 128   # cap for the 2-cocycle solver
MAX_SNF_DIM = 64         # public smith_normal_form dimension cap
