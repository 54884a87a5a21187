import random

import pytest

from artifact import _pykernels

_kernels = pytest.importorskip("artifact._kernels", reason="compiled kernels not built")


def word(rng, rank, n):
    return tuple(rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(n))


def test_word_kernels_agree():
    rng = random.Random(31)
    for _ in range(300):
        rank = rng.randint(1, 5)
        a, b = word(rng, rank, rng.randint(0, 30)), word(rng, rank, rng.randint(0, 30))
        ra, rb = _pykernels.free_reduce(a), _pykernels.free_reduce(b)
        assert _kernels.free_reduce(a) == ra
        assert _kernels.concat_reduce(ra, rb) == _pykernels.concat_reduce(ra, rb)
        assert _kernels.invert_word(ra) == _pykernels.invert_word(ra)
        images = [None] + [_pykernels.free_reduce(word(rng, rank, 4)) for _ in range(rank)]
        assert _kernels.substitute(ra, images) == _pykernels.substitute(ra, images)


def test_snf_kernels_agree():
    rng = random.Random(32)
    for _ in range(300):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        M = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(m)]
        fast = _pykernels.chain_normalize(_kernels.snf_diagonal([r[:] for r in M]))
        slow = _pykernels.chain_normalize(_pykernels.snf_diagonal([r[:] for r in M]))
        assert fast == slow
