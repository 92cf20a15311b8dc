"""Exception types shared across the package.

Each class carries the CLI exit code it maps to.
"""


class EquiauditError(Exception):
    exit_code = 1


class SpecError(EquiauditError, ValueError):
    """Malformed or inconsistent input (domain spec, parameters, tables)."""

    exit_code = 2

    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer


class GroupAxiomError(SpecError):
    """An explicit composition table violates a group axiom."""

    def __init__(self, message, triple=None):
        super().__init__(message, pointer="/group/compose")
        self.triple = triple


class DensityNotPreservedError(SpecError):
    def __init__(self, point, element, p_x, p_gx):
        super().__init__(
            f"action is not density preserving: p({point})={p_x!r} but "
            f"p(g{element}·{point})={p_gx!r}"
        )
        self.point = point
        self.element = element


class SingularQError(EquiauditError, ArithmeticError):
    """Q_Gx is rank deficient for an orbit; no minimizer is defined."""

    exit_code = 3

    def __init__(self, representative, sigma_min, sigma_max):
        super().__init__(
            f"Q matrix singular for orbit with representative {representative} "
            f"(sigma_min={sigma_min:.3g}, sigma_max={sigma_max:.3g}); restrict the "
            "domain to the support of p or use the orthogonal path"
        )
        self.representative = representative


class VerificationError(EquiauditError):
    exit_code = 4
