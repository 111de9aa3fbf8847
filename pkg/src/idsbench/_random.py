"""Seeded random streams and stratified sampling helpers.

All randomness goes through numpy's PCG64 generator, seeded from a
``SeedSequence`` built from the master seed plus integer tags, so distinct
consumers (algorithms, trees, caps) get independent, reproducible streams.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def tag(name: str) -> int:
    """Stable integer tag for a stream name."""
    return zlib.crc32(name.encode("utf-8"))


def derive_rng(seed: int, *tags: int | str) -> np.random.Generator:
    entropy = [seed & _MASK64] + [tag(t) if isinstance(t, str) else int(t) for t in tags]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def stratified_allocation(class_sizes: np.ndarray, total: int) -> np.ndarray:
    """Split ``total`` draws across classes proportionally (largest remainder).

    Every class gets floor or ceil of its exact share, so class ratios are
    preserved to within one row per class.
    """
    class_sizes = np.asarray(class_sizes, dtype=np.int64)
    n = int(class_sizes.sum())
    exact = class_sizes * total / n
    alloc = np.floor(exact).astype(np.int64)
    short = total - int(alloc.sum())
    if short:
        remainders = exact - alloc
        # stable: ties go to the lower class id
        order = np.argsort(-remainders, kind="stable")
        alloc[order[:short]] += 1
    return np.minimum(alloc, class_sizes)


def stratified_subsample(labels: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted row indices of a class-stratified sample without replacement."""
    labels = np.asarray(labels)
    if size >= len(labels):
        return np.arange(len(labels))
    classes = np.unique(labels)
    groups = [np.flatnonzero(labels == c) for c in classes]
    alloc = stratified_allocation(np.array([len(g) for g in groups]), size)
    # keep every class represented when the sample has room for it
    if size >= len(groups):
        for c in np.flatnonzero(alloc == 0):
            alloc[np.argmax(alloc)] -= 1
            alloc[c] = 1
    picked = [rng.permutation(g)[:k] for g, k in zip(groups, alloc)]
    return np.sort(np.concatenate(picked))
