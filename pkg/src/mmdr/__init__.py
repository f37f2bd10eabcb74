"""MMDR: result-feature-level multimodal fusion for 2D and BEV object detection.

The pipeline runs in three stages: per-modality first-stage detectors,
fusion of rasterized detection results with multi-scale global features,
and second-stage detectors over the fused grids. Everything is double
precision numpy; hot convolution kernels are numba-jitted with a pure
numpy fallback (see ``mmdr.backend``).
"""

__version__ = "0.1.0"

from . import backend

__all__ = ["backend", "__version__"]
