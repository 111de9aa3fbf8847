"""NSL-KDD intrusion-detection benchmark toolkit."""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND  # noqa: E402

__all__ = ["KERNEL_BACKEND", "__version__"]
