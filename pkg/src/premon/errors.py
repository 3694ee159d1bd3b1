"""Exception hierarchy shared by every premon module."""

from __future__ import annotations


class PremonError(Exception):
    """Base class; ``code`` is the short identifier used in reports."""

    code = "error"


class ParseError(PremonError):
    code = "parse_error"

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}, column {column})" if column is not None else f" (line {line})"
        super().__init__(message + loc)
        self.reason = message
        self.line = line
        self.column = column


class UnknownGenerator(ParseError):
    code = "unknown_generator"


class PresentationError(PremonError):
    """Structure constants violate antisymmetry or the Jacobi identity."""

    code = "invalid_presentation"

    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class ShapeError(PremonError, ValueError):
    code = "shape_mismatch"


class SingularMatrixError(PremonError, ArithmeticError):
    code = "singular"


class NonIntegerSpectrum(PremonError):
    code = "NonIntegerSpectrum"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NonSemisimple(PremonError):
    code = "NonSemisimple"


class UnknownSymbol(PremonError, KeyError):
    code = "unknown_symbol"

    def __str__(self):
        return self.args[0] if self.args else "unknown symbol"


class ValidationError(PremonError):
    """A central-element precondition failed; ``witnesses`` holds the evidence."""

    code = "validation_failed"

    def __init__(self, message, witnesses=()):
        super().__init__(message)
        self.witnesses = list(witnesses)
