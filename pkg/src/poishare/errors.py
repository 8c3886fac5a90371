"""Exception hierarchy shared by all solver and pipeline modules.

The three leaf classes map onto the CLI exit codes: InputError -> 1,
InfeasibleError -> 2, CrosscheckError -> 3.
"""


class PoiShareError(Exception):
    """Base class for all package errors."""


class InputError(PoiShareError):
    """Malformed or out-of-range input (bad index, bad file, bad flag)."""


class InfeasibleError(PoiShareError):
    """A solver refusal: the request is well-formed but cannot be served
    (budget exceeds candidates, enumeration cap exceeded, precondition of
    an algorithm violated)."""


class CrosscheckError(PoiShareError):
    """The matrix evaluation route and the set evaluation route disagreed."""
