"""Exception hierarchy shared by the engines and the command line."""


class AdjcalcError(Exception):
    """Base class for every error raised by this package."""


class InputError(AdjcalcError, ValueError):
    """Malformed input: arity or space mismatch, bad shapes, bad files."""


class ParseError(InputError):
    """An adjoint-word expression could not be parsed.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class StructureError(AdjcalcError):
    """An algebraic axiom failed where it must hold (associativity, module laws)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CayleyError(InputError):
    """A multiplication table violates one or more group axioms.

    ``violations`` is a list of ``(axiom_name, witness)`` pairs.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        lines = [f"{name}: witness {witness}" for name, witness in self.violations]
        super().__init__("invalid Cayley table\n  " + "\n  ".join(lines))

    @property
    def axioms(self):
        return [name for name, _ in self.violations]
