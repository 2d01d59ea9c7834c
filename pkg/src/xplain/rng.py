"""Deterministic named RNG substreams.

A single master seed governs every random choice in the toolkit. Components
derive independent generators by hashing a tuple of string/int tokens, so
adding a new consumer never perturbs the streams of existing ones and results
are reproducible across platforms.
"""

import hashlib

import numpy as np

__all__ = ["fold", "substream"]


def substream(master_seed, *tokens):
    """Return a ``numpy.random.Generator`` for the named substream.

    Parameters
    ----------
    master_seed : int
        The run-wide seed (the CLI's --seed).
    *tokens
        Any hashable labels identifying the consumer, e.g.
        ``substream(seed, "grow", direction, round_idx)``.
    """
    if not isinstance(master_seed, (int, np.integer)):
        raise TypeError("master_seed must be an integer")
    digest = hashlib.sha256(
        "\x1f".join(str(t) for t in tokens).encode("utf-8")
    ).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    ss = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, *words])
    return np.random.default_rng(ss)


def fold(master_seed, *tokens):
    """Derive a child integer seed from the master seed and labels.

    Lets one component hand a plain int seed to another (which will build
    its own substreams from it) without the two sharing any stream.
    """
    if not isinstance(master_seed, (int, np.integer)):
        raise TypeError("master_seed must be an integer")
    digest = hashlib.sha256(
        "\x1f".join([str(int(master_seed))] + [str(t) for t in tokens]).encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "little")
