"""Tree ring detection on wood cross-section images."""

from ._core import (
    DetectParams,
    detect,
    evaluate,
    generate_disk,
    random_radii,
    scores_from_counts,
)

__all__ = [
    "DetectParams",
    "detect",
    "evaluate",
    "generate_disk",
    "random_radii",
    "scores_from_counts",
]
