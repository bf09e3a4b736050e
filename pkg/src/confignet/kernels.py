"""Backend selection for the candidate-scoring hot loop.

The compiled extension is used when it was built; otherwise the numpy
implementation. Set ``CONFIGNET_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

python_score_candidates = _kernels_py.score_candidates

try:
    if os.environ.get("CONFIGNET_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend forced")
    from ._kernels import score_candidates as compiled_score_candidates
except ImportError:
    compiled_score_candidates = None

if compiled_score_candidates is not None:
    BACKEND = "cython"
    score_candidates = compiled_score_candidates
else:
    BACKEND = "python"
    score_candidates = python_score_candidates
