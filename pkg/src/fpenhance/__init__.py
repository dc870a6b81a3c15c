"""Fingerprint enhancement via contextual Gabor filtering, plus the
ground-truth generation, augmentation, and minutiae-based evaluation
machinery around it.

Conventions used throughout:

* Rasters are numpy arrays of shape (height, width).
* Grayscale images are uint8, 0 = black, 255 = white; ridges are dark
  in captured fingerprints and white in enhanced output.
* Segmentation masks are boolean, True = foreground.
* Orientation fields hold ridge angles in radians, in [0, pi), measured
  from the positive x axis (columns) counter-clockwise with y pointing up.
* Frequency maps hold ridge frequencies in cycles/pixel; background is 0.
* Enhanced images are float arrays in [0, 1], 1 = ridge.
"""

from .core import Minutia, MinutiaKind, erode_mask
from .gabor import GaborBank, GaborKernel, build_bank, gabor_kernel, select_filter
from .fields import (
    FrequencyParams,
    OrientationParams,
    double_angle_decode,
    double_angle_encode,
    estimate_frequency,
    estimate_orientation,
    frequency_from_skeleton,
)
from .enhance import EnhanceOptions, enhance_contextual, gt_enhance
from .minutiae import binarize, detect_minutiae, thin
from .evalkit import (
    EvalReport,
    MatchCriteria,
    TverskyParams,
    exclude_boundary,
    match_minutiae,
    prf1,
    sweep,
    tversky_loss,
)
from .augment import AugmentSpec, Sample, augment

__version__ = "0.1.0"
