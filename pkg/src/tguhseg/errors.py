"""Exception types shared across the package.

Exit-code mapping in the CLI: InputError -> 1, ContractError -> 2.
"""


class InputError(Exception):
    """Malformed or missing user input (files, scenario definitions)."""


class ContractError(ValueError):
    """A function was called outside its documented preconditions."""
