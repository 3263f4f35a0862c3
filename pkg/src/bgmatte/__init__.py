"""Person matting from a photo plus a clean background plate.

Recovers per-pixel foreground color and alpha for human subjects, trains on
synthetic composites with supervision, adapts to real captures with a
teacher-student adversarial scheme, and renders composites onto novel
backgrounds.
"""

__version__ = "0.1.0"

from .core import composite, composite_residual, solve_foreground, to_grayscale  # noqa: F401
