"""
bm_distance/errors.py
─────────────────────────────────────────────────────────────────────────────
Exception hierarchy. Everything the toolkit raises on purpose derives from
BMError so the CLI can map it to an exit code in one place.
"""

from __future__ import annotations

from typing import Any, Optional


class BMError(Exception):
    """Base class. `witness` is a JSON-ready payload describing the failure."""

    def __init__(self, message: str, witness: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.witness = witness or {}

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), "witness": self.witness}


# ── exact-core ────────────────────────────────────────────────────────────────

class SingularMatrix(BMError): ...
class DimensionMismatch(BMError): ...
class NotConvex(BMError): ...
class Degenerate(BMError): ...


# ── bm-certify ────────────────────────────────────────────────────────────────

class CertificationFailure(BMError):
    """Raised with the lexicographically first violating (vertex, halfspace) pair."""


class ZeroColumn(BMError): ...


# ── lemma-checks ──────────────────────────────────────────────────────────────

class SamplingExhausted(BMError): ...
class PreconditionViolated(BMError): ...


# ── asymmetry ─────────────────────────────────────────────────────────────────

class InconsistentRepresentations(BMError): ...
class DegenerateBody(BMError): ...


# ── equidistant ───────────────────────────────────────────────────────────────

class InvalidParams(BMError): ...
class NotSymmetric(BMError): ...
class NoContainingSubtriangle(BMError): ...
class NoParallelPair(BMError): ...
class MultiplePairs(BMError): ...


class InclusionFailure(BMError):
    """One of K ⊆ L₀ ⊆ K′ failed. For valid inputs this means a bug."""


# ── search ────────────────────────────────────────────────────────────────────

class CertificationRegression(BMError): ...


class TheoremViolation(BMError):
    """A proven statement failed on exact numbers. Never expected; always a bug."""


# Exit code 1 in the CLI: the input was fine but a certificate or property failed.
FAILURE_ERRORS: tuple[type[BMError], ...] = (
    CertificationFailure,
    InclusionFailure,
    PreconditionViolated,
    CertificationRegression,
    TheoremViolation,
)
