"""Coverage-guided fuzzing for block-diagram control models.

The heavy lifting lives in the C++ extension; this package re-exports the
main operations: model parsing/execution, n-wise suite generation, the
coverage-word primitives, and whole fuzzing campaigns.
"""

from ._core import (
    Model,
    __version__,
    cond_flipped,
    dec_flipped,
    fast_nwise,
    record,
    run_campaign,
)

__all__ = [
    "Model",
    "__version__",
    "cond_flipped",
    "dec_flipped",
    "fast_nwise",
    "record",
    "run_campaign",
]
