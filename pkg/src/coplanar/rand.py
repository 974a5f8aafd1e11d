"""Splittable counter-based randomness.

Every random decision in the package is a pure function of a user seed and
a canonical integer path (domain tag, candidate rank, refinement level),
implemented on top of the Philox counter-based generator.  Parallel and
serial runs therefore produce identical results, and decisions for distinct
candidates are independent regardless of enumeration order.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np

# domain tags for the per-command decision streams
TAG_STRUCTURE = 1
TAG_HIGH = 2
TAG_LOW = 3
TAG_PRANDOM = 4
TAG_SAMPLER = 5
TAG_REFINE = 6

_WORD = 1 << 64


def derive_key(seed, *path):
    """Two 64-bit Philox key words from (seed, path) via SHA-256."""
    blob = struct.pack("<q", int(seed)) + b"".join(
        struct.pack("<q", int(x)) for x in path)
    digest = hashlib.sha256(b"coplanar.rand/" + blob).digest()
    return np.frombuffer(digest[:16], dtype=np.uint64)


def raw_words(seed, count, *path):
    """The first `count` words of the (seed, path) stream."""
    bg = np.random.Philox(key=derive_key(seed, *path))
    return bg.random_raw(count)


def words_at(seed, ranks, *path):
    """Stream words at the given counter positions (vectorized).

    ranks: array-like of nonnegative ints.  Word r depends only on
    (seed, path, r).
    """
    ranks = np.asarray(ranks, dtype=np.int64)
    if ranks.size == 0:
        return np.zeros(0, dtype=np.uint64)
    top = int(ranks.max()) + 1
    stream = raw_words(seed, top, *path)
    return stream[ranks]


def _refine_accept(seed, rank, num, den, path):
    """Exact tie-break for a Bernoulli decision whose first 64 bits hit the
    threshold word.  Consumes further words from a per-rank substream."""
    level = 0
    while True:
        word = int(raw_words(seed, 1, *path, TAG_REFINE, int(rank), level)[0])
        t, rem = divmod(num * _WORD, den)
        if word < t:
            return True
        if word > t or rem == 0:
            return False
        num = rem  # conditional law given another exact boundary hit
        level += 1


def bernoulli_exact(seed, ranks, num, den, *path):
    """Vectorized exact-Bernoulli(num/den) decisions, one per rank.

    Decision r accepts iff the uniform real built from the (seed, path)
    stream at position r is < num/den; exact in rational arithmetic, with
    a per-rank refinement stream for the (probability 2^-64) boundary word.
    """
    if not 0 <= num <= den or den <= 0:
        raise ValueError(f"probability {num}/{den} is not in [0, 1]")
    ranks = np.asarray(ranks, dtype=np.int64)
    if ranks.size == 0:
        return np.zeros(0, dtype=bool)
    words = words_at(seed, ranks, *path)
    threshold, rem = divmod(num * _WORD, den)
    if threshold >= _WORD:
        return np.ones(ranks.size, dtype=bool)
    accept = words < np.uint64(threshold)
    if rem:
        boundary = np.nonzero(words == np.uint64(threshold))[0]
        for i in boundary:
            accept[i] = _refine_accept(seed, int(ranks[i]), rem, den, path)
    return accept


def bernoulli_one(seed, rank, num, den, *path):
    return bool(bernoulli_exact(seed, [rank], num, den, *path)[0])


def uniform_below(seed, bound, count, *path):
    """count iid uniform draws in [0, bound) by rejection from 64-bit words.

    Deterministic: draw i uses words from the substream (path, i).
    """
    if bound <= 0:
        raise ValueError("bound must be positive")
    limit = _WORD - _WORD % bound
    out = np.empty(count, dtype=np.int64)
    for i in range(count):
        level = 0
        while True:
            w = int(raw_words(seed, 1, *path, int(i), level)[0])
            if w < limit:
                out[i] = w % bound
                break
            level += 1
    return out
