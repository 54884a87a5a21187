"""Backend selection for the word-rewriting and Smith kernels.

The compiled extension is used when it was built; set ``FOXRES_PURE_PYTHON=1``
to force the reference implementation.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("FOXRES_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

free_reduce = _impl.free_reduce
concat_reduce = _impl.concat_reduce
invert_word = _impl.invert_word
substitute = _impl.substitute
chain_normalize = _pykernels.chain_normalize


def snf_diagonal(matrix):
    """Nonzero diagonal entries of some diagonal form of an integer matrix."""
    if _impl is not _pykernels:
        try:
            return _impl.snf_diagonal(matrix)
        except OverflowError:
            pass
    return _pykernels.snf_diagonal(matrix)
