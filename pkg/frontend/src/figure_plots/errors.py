class PanelError(Exception):
    """Base class for rendering failures."""


class MissingInputError(PanelError):
    """A required CSV or sidecar file is absent or empty."""


class MissingColumnError(PanelError):
    """A required CSV column is absent; the message names it."""
