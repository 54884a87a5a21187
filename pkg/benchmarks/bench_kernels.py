"""Compiled vs pure-Python kernels on word rewriting, Smith forms and a full homology run.

    python benchmarks/bench_kernels.py [--repeat N] [--json]
"""

import argparse
import json
import os
import random
import subprocess
import sys
import timeit

from artifact import _pykernels

try:
    from artifact import _kernels
except ImportError:
    _kernels = None


def random_word(rng, rank, length):
    return tuple(rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(length))


def word_cases(rng):
    rank = 6
    images = [None] + [_pykernels.free_reduce(random_word(rng, rank, 7)) for _ in range(rank)]
    words = [_pykernels.free_reduce(random_word(rng, rank, 60)) for _ in range(200)]
    return images, words


def boundary_matrices():
    """Integer boundary matrices of the Milnor fiber complex of A_4 (entries of Z[t]/(t^6 - 1) expanded)."""
    from artifact.milnor import milnor_complex

    C = milnor_complex(4)
    out = []
    for k in sorted(C.boundaries):
        M = C.boundaries[k]
        big = []
        for row in M.rows:
            blocks = [M.ring.regular_matrix(x) for x in row]
            for i in range(len(blocks[0]) if blocks else 0):
                big.append([int(v) for b in blocks for v in b[i]])
        if big:
            out.append(big)
    return out


def bench_module(mod, repeat, rng_seed=1):
    rng = random.Random(rng_seed)
    images, words = word_cases(rng)
    mats = boundary_matrices()

    def words_job():
        for w in words:
            s = mod.substitute(w, images)
            mod.concat_reduce(s, mod.invert_word(s))
            mod.free_reduce(w + w)

    def snf_job():
        for a in mats:
            mod.snf_diagonal([list(r) for r in a])

    out = {}
    for name, job in (("words", words_job), ("snf", snf_job)):
        out[name] = min(timeit.repeat(job, number=1, repeat=repeat))
    return out


def end_to_end(pure: bool) -> float:
    """Integral homology of P_5 in a fresh interpreter with the chosen backend."""
    env = dict(os.environ, FOXRES_PURE_PYTHON="1" if pure else "0")
    code = (
        "import time;from artifact.builders import pure_braid;from artifact.resolution import trivial_complex;"
        "from artifact.homology import homology;t=time.perf_counter();homology(trivial_complex(pure_braid(5)));"
        "print(time.perf_counter()-t)"
    )
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(res.stdout.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--no-end-to-end", action="store_true")
    args = ap.parse_args()

    rows = {"python": bench_module(_pykernels, args.repeat)}
    if _kernels is not None:
        rows["cython"] = bench_module(_kernels, args.repeat)
    if not args.no_end_to_end:
        rows["python"]["homology_P5"] = end_to_end(pure=True)
        if _kernels is not None:
            rows["cython"]["homology_P5"] = end_to_end(pure=False)

    if args.json:
        print(json.dumps(rows, indent=1))
        return
    if _kernels is None:
        print("compiled kernels not built; showing the Python backend only")
    cols = list(rows["python"])
    print(f"{'backend':10s}" + "".join(f"{c:>14s}" for c in cols))
    for backend, r in rows.items():
        print(f"{backend:10s}" + "".join(f"{r[c]:13.4f}s" for c in cols))
    if "cython" in rows:
        print(f"{'speedup':10s}" + "".join(f"{rows['python'][c] / rows['cython'][c]:13.1f}x" for c in cols))


if __name__ == "__main__":
    main()
