"""Exception hierarchy shared by all modules."""

__all__ = [
    "PronyError",
    "DimensionMismatchError",
    "InsufficientWindowError",
    "RankNotStabilizedError",
    "NumericalDegeneracyError",
    "MissingBorderError",
    "NonCommutingError",
    "DefectiveClusterError",
    "ZeroComponentError",
    "RankDeficientVandermondeError",
    "NotShiftInvariantError",
    "NonBlockDiagonalError",
]


class PronyError(Exception):
    """Base class for failures of a precondition or a numerical check."""

    #: short machine-readable tag used in CLI error reports
    kind = "prony-error"

    def to_json(self):
        return {"error": self.kind, "message": str(self)}


class DimensionMismatchError(PronyError, ValueError):
    kind = "dimension-mismatch"


class InsufficientWindowError(PronyError):
    """Raised when a signal is accessed outside of its sampling window.

    ``missing`` holds the lattice points that would be needed.
    """

    kind = "insufficient-window"

    def __init__(self, missing, what="signal window"):
        self.missing = [tuple(int(a) for a in m) for m in missing]
        shown = ", ".join(str(m) for m in self.missing[:8])
        more = "" if len(self.missing) <= 8 else f" (+{len(self.missing) - 8} more)"
        super().__init__(
            f"{what} is missing {len(self.missing)} lattice point(s): {shown}{more}"
        )

    def to_json(self):
        out = super().to_json()
        out["missing"] = [list(m) for m in self.missing]
        return out


class RankNotStabilizedError(PronyError):
    kind = "rank-not-stabilized"


class NumericalDegeneracyError(PronyError):
    kind = "numerical-degeneracy"


class MissingBorderError(PronyError):
    kind = "missing-border"


class NonCommutingError(PronyError):
    kind = "non-commuting"


class DefectiveClusterError(PronyError):
    kind = "defective-cluster"


class ZeroComponentError(PronyError):
    kind = "zero-component"


class RankDeficientVandermondeError(PronyError):
    kind = "rank-deficient-vandermonde"


class NotShiftInvariantError(PronyError):
    kind = "not-shift-invariant"


class NonBlockDiagonalError(PronyError):
    kind = "non-block-diagonal"
