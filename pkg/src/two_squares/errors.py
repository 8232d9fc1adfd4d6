"""Exception taxonomy shared by the library and the CLI exit-code mapping."""


class InputError(ValueError):
    """A caller-supplied argument violates a precondition."""


class CapabilityError(RuntimeError):
    """The requested computation needs data the inputs do not carry."""


class InvariantError(RuntimeError):
    """An internal consistency check failed; results must not be trusted."""
