"""Fantasy cricket engine: ingestion, projection, and roster optimization."""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
