import random

from artifact.freegroup import FreeAutomorphism, FreeWord, compose


def random_code(rng: random.Random, rank: int, length: int) -> tuple:
    return tuple(rng.choice((1, -1)) * rng.randint(1, rank) for _ in range(length))


def random_word(rng: random.Random, rank: int, max_len: int) -> FreeWord:
    return FreeWord(rank, random_code(rng, rank, rng.randint(0, max_len)))


def elementary_automorphisms(rank: int) -> list:
    """Nielsen moves with their inverses: transvections, inversions, swaps."""
    gens = [(i,) for i in range(1, rank + 1)]
    out = []
    for i in range(1, rank + 1):
        img = list(gens)
        img[i - 1] = (-i,)
        out.append(FreeAutomorphism(rank, img, img))
        for j in range(1, rank + 1):
            if i == j:
                continue
            for e in (1, -1):
                img = list(gens)
                inv = list(gens)
                img[i - 1] = (i, e * j)
                inv[i - 1] = (i, -e * j)
                out.append(FreeAutomorphism(rank, img, inv))
                img = list(gens)
                inv = list(gens)
                img[i - 1] = (e * j, i)
                inv[i - 1] = (-e * j, i)
                out.append(FreeAutomorphism(rank, img, inv))
            if i < j:
                img = list(gens)
                img[i - 1], img[j - 1] = (j,), (i,)
                out.append(FreeAutomorphism(rank, img, img))
    return out


def random_automorphism(rng: random.Random, rank: int, max_image: int = 6, steps: int = 4) -> FreeAutomorphism:
    moves = elementary_automorphisms(rank)
    while True:
        phi = FreeAutomorphism.identity(rank)
        for _ in range(rng.randint(1, steps)):
            phi = compose(rng.choice(moves), phi)
        if max(len(w) for w in phi.images) <= max_image:
            return phi
