"""Failure modes of the numerical index machinery.

``NumericalAbort`` marks conditions where the requested index is not
numerically decidable with the given data (as opposed to malformed input,
which raises ValueError subclasses).  The CLI maps these to exit code 2.
"""

__all__ = [
    "NumericalAbort",
    "DegenerateCrossingError",
    "UnresolvedClusterError",
    "IntegrationError",
]


class NumericalAbort(RuntimeError):
    pass


class DegenerateCrossingError(NumericalAbort):
    """A crossing form has an (approximate) kernel at the working tolerance.

    The index is a fixed-endpoint homotopy invariant, so a small perturbation
    of the path or of the reference Lagrangian removes the degeneracy without
    changing the answer; the message carries that guidance.
    """

    def __init__(self, message, records=None):
        super().__init__(message)
        self.records = records or []


class UnresolvedClusterError(NumericalAbort):
    """Two refined crossings closer than the time tolerance."""


class IntegrationError(NumericalAbort):
    """The flow integrator could not reach the requested symplectic defect."""
