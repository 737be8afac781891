"""
Permutations, sign vectors and reproducible random streams.

All randomness flows from one integer seed. Every consumer draws from its own
stream, and every work block of a stream owns a Philox generator keyed by
(seed, stream, block), so results do not depend on how blocks are spread over
worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from .config import log
from .errors import DomainError

__all__ = [
    "STREAM_PERMUTATIONS",
    "STREAM_MATRICES",
    "STREAM_SIGNS",
    "STREAM_INSTANCES",
    "block_generator",
    "instance_generator",
    "next_permutation",
    "unrank_permutation",
    "iter_permutations",
    "permutation_table",
    "sample_permutations",
    "sign_table",
    "block_ranges",
    "run_blocks",
]

# Stream identifiers of the seed splitting scheme
STREAM_PERMUTATIONS = 1
STREAM_MATRICES = 2
STREAM_SIGNS = 3
STREAM_INSTANCES = 4


def block_generator(seed, stream, block=0):
    """Counter-based generator for one block of one stream."""
    sequence = np.random.SeedSequence([int(seed), int(stream), int(block)])
    return np.random.Generator(np.random.Philox(sequence))


def instance_generator(seed, label):
    """Generator for the random instances of a named check."""
    key = sum((i + 1) * ord(ch) for i, ch in enumerate(label))
    return block_generator(seed, STREAM_INSTANCES, key)


def next_permutation(perm):
    """
    Advance ``perm`` in place to its lexicographic successor.

    Returns:
        False when ``perm`` was the last permutation (it is then left unchanged).
    """
    n = len(perm)
    i = n - 2
    while i >= 0 and perm[i] >= perm[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while perm[j] <= perm[i]:
        j -= 1
    perm[i], perm[j] = perm[j], perm[i]
    perm[i + 1:] = perm[i + 1:][::-1]
    return True


def unrank_permutation(index, n):
    """The permutation of rank ``index`` in lexicographic order (factorial base)."""
    total = math.factorial(n)
    if not 0 <= index < total:
        raise DomainError(f"Permutation rank {index} outside [0, {total})")
    pool = list(range(n))
    perm = []
    for k in range(n, 0, -1):
        step = math.factorial(k - 1)
        digit, index = divmod(index, step)
        perm.append(pool.pop(digit))
    return perm


def iter_permutations(n, start=0, stop=None):
    """Yield permutations of rank start..stop-1 as lists."""
    stop = math.factorial(n) if stop is None else stop
    if start >= stop:
        return
    perm = unrank_permutation(start, n)
    yield list(perm)
    for _ in range(start + 1, stop):
        next_permutation(perm)
        yield list(perm)


@lru_cache(maxsize=16)
def permutation_table(n):
    """All n! permutations of range(n), one per row, in lexicographic order."""
    table = np.array(list(iter_permutations(n)), dtype=np.intp).reshape(-1, n)
    table.setflags(write=False)
    log(f"Permutation table for n={n}: {len(table)} rows", "debug")
    return table


def sample_permutations(rng, count, n):
    """``count`` independent uniform permutations (Fisher-Yates per row)."""
    base = np.tile(np.arange(n, dtype=np.intp), (count, 1))
    return rng.permuted(base, axis=1)


@lru_cache(maxsize=16)
def sign_table(n, half=False):
    """
    All sign vectors in {+1,-1}^n in lexicographic order (+1 first).

    With ``half`` only vectors starting with +1 are returned; averages of
    |<eps, v>|-type expressions are unchanged since eps and -eps give equal terms.
    """
    bits = (np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    table = 1.0 - 2.0 * bits
    if half and n > 0:
        table = table[: 2 ** (n - 1)]
    table.setflags(write=False)
    return table


def block_ranges(total, block_size):
    """Split range(total) into consecutive [start, stop) blocks."""
    if block_size < 1:
        raise DomainError(f"Block size must be >= 1, got {block_size}")
    return [(start, min(start + block_size, total)) for start in range(0, total, block_size)]


def run_blocks(work, n_blocks, threads=1):
    """
    Evaluate ``work(block)`` for every block.

    Results come back in block order whatever the number of threads.
    """
    if threads <= 1 or n_blocks <= 1:
        return [work(block) for block in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, range(n_blocks)))
