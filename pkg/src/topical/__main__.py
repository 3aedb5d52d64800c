"""Allow ``python -m topical`` to behave like the installed console script."""

from .cli import entrypoint

entrypoint()
