"""Exception hierarchy.

Every validation failure raised by the library derives from
:class:`SizeNetError` (itself a ``ValueError``), which lets the command line
map input problems to exit status 2 and everything else to status 1.
"""


class SizeNetError(ValueError):
    """Base class for invalid-input errors."""


class LabelSetError(SizeNetError):
    pass


class FilenameError(SizeNetError):
    """A filename does not follow the ``<stem>_<meters>.<ext>`` convention."""


class MissingUnderscoreError(FilenameError):
    pass


class UnknownExtensionError(FilenameError):
    pass


class NonNumericDistanceError(FilenameError):
    pass


class NonPositiveDistanceError(FilenameError):
    pass


class ManifestError(SizeNetError):
    pass


class FeatureError(SizeNetError):
    pass


class ScoreError(SizeNetError):
    pass


class GateError(SizeNetError):
    pass


class EvalError(SizeNetError):
    pass


class SynthConfigError(SizeNetError):
    pass
