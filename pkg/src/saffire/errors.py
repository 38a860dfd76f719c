"""Exception hierarchy for the saffire package.

All library errors derive from SaffireError so callers can catch one base
class. DataError groups problems with user-supplied inputs (images,
manifests, model files); the CLI maps it to its data-error exit code.
"""


class SaffireError(Exception):
    """Base class for all saffire errors."""


class DataError(SaffireError):
    """Bad or unusable input data (images, annotations, files)."""


# --- features ---------------------------------------------------------------

class UnsupportedFamily(SaffireError):
    """Unknown feature-family tag."""


class EmptyFeatureSet(DataError):
    """Feature extraction found nothing usable in the image."""


class FamilyMismatch(SaffireError):
    """Two feature sets of different families cannot be matched."""


class DegenerateFeature(SaffireError):
    """Feature with non-positive size cannot define a transform."""


# --- training ---------------------------------------------------------------

class InsufficientTrainData(DataError):
    """Fewer than two annotated training images."""


class UntrainableImage(DataError):
    """A training image produced no transform cluster.

    Carries the offending image index so the caller can drop or replace
    that sample.
    """

    def __init__(self, index: int, message: str = ""):
        self.index = index
        super().__init__(message or f"training image {index} produced no usable cluster")


class EmptyPath(SaffireError):
    """Path cost requested for an empty node sequence."""


class NoViablePath(DataError):
    """Every complete root-to-leaf path has zero surviving features."""


class AllFamiliesFailed(DataError):
    """No candidate feature family produced a trainable model."""


# --- anchor model -----------------------------------------------------------

class EmptyModel(SaffireError):
    """Attempt to build an anchor model with no surviving features."""


class RoiOutsideImage(SaffireError):
    """Too few ROI content samples fall inside the image."""


class LengthMismatch(SaffireError):
    """Descriptor vectors of different lengths."""


class FormatVersionMismatch(DataError):
    """Model file written by an unsupported format version."""


class CorruptModel(DataError):
    """Model file failed structural or digest validation."""


# --- synthetic scenes -------------------------------------------------------

class SpecError(SaffireError):
    """Scene spec produces an invalid scene (e.g. anchor occluded)."""


# --- evaluation -------------------------------------------------------------

class EmptyInput(SaffireError):
    """Statistics requested over an empty value list."""


class ModelManifestFamilyMismatch(DataError):
    """Manifest declares a feature family other than the model's."""
