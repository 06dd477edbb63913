"""Python bindings for the multi-patch IETI-DP solver core."""
from ._core import *  # noqa: F401,F403
