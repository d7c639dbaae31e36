"""Custom exceptions for error handling and flow control.

This module defines the application's own exception hierarchy, covering
malformed input (configs, shift specs, bit streams), exhausted search budgets,
inconsistent tilings and programs the explicit decompressor refuses to run.
The command line maps `BudgetExceededError` to exit code 2 and every other
`FolnerBrudnoError` to exit code 1.
"""


class FolnerBrudnoError(Exception):
    """Base exception class for every error raised by this package."""

    pass


class ValidationError(FolnerBrudnoError):
    """Base exception class for rejected user input (files, flags, parameters)."""

    pass


class ConfigValidationError(ValidationError):
    """Raised when a run configuration or an environment override is invalid.

    The message always starts with the name of the offending field so the
    command line can print a one-line diagnostic.
    """

    pass


class SpecValidationError(ValidationError):
    """Raised when a shift spec file violates its schema.

    Examples include a letter outside 1..k, a coordinate tuple whose arity
    does not match the group, or an empty forbidden support.
    """

    pass


class SpecNotNearestNeighborError(ValidationError):
    """Raised when a transfer-matrix count is requested for a spec that is not
    a nearest-neighbour shift over Z (every forbidden support must be {0, 1})."""

    pass


class CodecError(FolnerBrudnoError):
    """Base exception class for bit-level encoding and decoding failures."""

    pass


class MalformedPrefixError(CodecError):
    """Raised when a bit stream does not start with a valid hat encoding.

    This covers a doubled-pair region containing "10", a stream exhausted
    before the delimiter or before the announced binary part, and
    non-canonical binary parts (leading zeros).
    """

    pass


class LetterOutOfRangeError(CodecError):
    """Raised when a letter is outside the alphabet {1, ..., k}."""

    pass


class CanonicalIndexOverflowError(FolnerBrudnoError):
    """Raised when a canonical index would exceed the configured bit width."""

    pass


class BudgetExceededError(FolnerBrudnoError):
    """Base exception class for searches that ran out of their configured budget.

    The theory guarantees termination of every search in this package, not
    its speed. Hitting a budget therefore means "raise the cap", not "the
    input is wrong", and the command line reports it with exit code 2.
    """

    pass


class SearchBudgetExceededError(BudgetExceededError):
    """Raised when an index search (invariance index, normalisation,
    center decision, coset representative) passes its cap without an answer."""

    pass


class EnumerationBudgetExceededError(BudgetExceededError):
    """Raised when a pattern-language enumeration visits more search nodes
    than allowed, or a language is too large to be listed."""

    pass


class TilingError(FolnerBrudnoError):
    """Raised when a tile provider contradicts the monotiling axioms
    (a point with no or two decompositions, a missing identity)."""

    pass


class FactorizationError(TilingError):
    """Raised when a product x·t of the extension construction does not
    factor as λ·ρ with λ in the chosen section and ρ in the kernel.

    This signals an incorrect coset section or a wrong exact sequence.
    """

    pass


class ProgramRejectedError(FolnerBrudnoError):
    """Raised when the explicit decompressor terminates without output.

    This is the only outcome for programs whose header, dictionary, remainder
    or indices are inconsistent with the tiling geometry.
    """

    pass


class DictionaryMissError(FolnerBrudnoError):
    """Raised when a tile word is absent from a full-language dictionary.

    It cannot happen for configurations of the shift when the language is
    exact, so it flags a non-admissible input.
    """

    pass


class ConstraintViolationError(FolnerBrudnoError):
    """Raised when a requested configuration cannot satisfy the shift's
    forbidden patterns on its window."""

    pass
