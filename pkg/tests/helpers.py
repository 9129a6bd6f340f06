"""Shared constructors for the test suite."""
from bssp.sampling import MODE_SIMON, sample_instance, sample_permutation
from bssp.shuffling import (build_bijective_shuffling, build_shuffling,
                            embed_width)


def random_bijective(n, d, seed, mode=MODE_SIMON):
    inst = sample_instance(n, mode, seed)
    perms = [sample_permutation(embed_width(n, d), seed + 17 * (j + 1))
             for j in range(d)]
    return build_bijective_shuffling(build_shuffling(d, inst, perms), seed)
