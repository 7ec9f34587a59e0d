"""Exception types shared across the package."""


class FairtreeError(Exception):
    """Base class for every package-specific error."""


class ModelError(FairtreeError):
    """A scenario tree or market model violates a structural invariant."""


class MarketFileError(FairtreeError):
    """A market document failed parsing or schema validation.

    ``location`` is a JSON-path-style string pointing at the offending
    element (``$.tree[3].prob``, ``$.assets.bond`` and so on).
    """

    def __init__(self, location: str, message: str):
        self.location = location
        self.reason = message
        super().__init__(f"{location}: {message}")


class UnfairMarketError(FairtreeError):
    """Raised by operations that require a fair market when it is not."""


class DeflatorError(FairtreeError):
    """A candidate deflator or measure fails its validity checks."""


class SupermartingaleError(FairtreeError):
    """A process fails the one-step supermartingale test required for a
    consumption decomposition.  Carries the offending node and the local
    closure vertex that witnesses the violation."""

    def __init__(self, node_id: str, vertex, excess: float):
        self.node_id = node_id
        self.vertex = vertex
        self.excess = excess
        super().__init__(
            f"process is not a one-step supermartingale at node {node_id!r} "
            f"(excess {excess:.3e} under local vertex {vertex})"
        )


class SizeGuardError(FairtreeError):
    """A brute-force routine was asked to exceed its combinatorial guard."""


class SolverError(FairtreeError):
    """Internal numerical failure: pivot budget exhausted, a residual above
    tolerance, or a certificate that cannot be produced."""
