"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: InputError -> 2, NumericalError -> 3.
"""


class IsomatchError(Exception):
    """Base class for all package errors."""


class InputError(IsomatchError):
    """Bad input data: unreadable files, malformed meshes, mismatched shapes."""


class MeshError(InputError):
    """Mesh fails a structural invariant (degenerate face, disconnected, ...)."""


class NumericalError(IsomatchError):
    """A numerical routine failed (eigensolver non-convergence, rank deficiency)."""
