"""Deterministic chunked sampling of power sums.

The sample for one dimension ``n`` is cut into chunks of about
``CHUNK_VARIATES`` coordinates. Chunk ``i`` draws from its own PCG64 stream
seeded by ``SeedSequence(seed, spawn_key=(stream, n, i))``, so the layout
and every draw depend only on the configuration, never on how many worker
threads execute the chunks. Results are reassembled in chunk order.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..distributions import MixingLaw, sample_mixing
from ..kernels import power_sums
from ..statistics import MomentSummary, merge

__all__ = ["CHUNK_VARIATES", "PowerSums", "chunk_layout", "chunk_generator", "simulate_power_sums", "map_chunks"]

CHUNK_VARIATES = 1 << 22

# distinct RNG streams inside one experiment
STREAM_BALL = 0
STREAM_HAAR = 1


@dataclass(frozen=True)
class PowerSums:
    """Per-draw ``sum |Y|^p``, ``sum |Y|^q``, head sum over the first ``k`` and ``W``."""

    sum_p: np.ndarray
    sum_q: np.ndarray
    sum_head: np.ndarray
    w: np.ndarray

    def __len__(self) -> int:
        return self.sum_p.size


def chunk_layout(n: int, samples: int) -> list[int]:
    """Row counts of the chunks for ``samples`` draws of dimension ``n``."""
    rows = max(1, CHUNK_VARIATES // n)
    full, rest = divmod(samples, rows)
    return [rows] * full + ([rest] if rest else [])


def chunk_generator(seed: int, stream: int, n: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=(stream, n, index))
    return np.random.Generator(np.random.PCG64(ss))


def map_chunks(fn: Callable[[int, int], object], layout: list[int], threads: int = 1) -> list:
    """``[fn(index, rows) for each chunk]`` in chunk order, on ``threads`` workers."""
    if threads <= 1 or len(layout) == 1:
        return [fn(i, r) for i, r in enumerate(layout)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(len(layout)), layout))


def simulate_power_sums(
    seed: int,
    n: int,
    samples: int,
    p: float,
    q: float,
    law: MixingLaw,
    k: Optional[int] = None,
    threads: int = 1,
    stream: int = STREAM_BALL,
    backend: Optional[str] = None,
) -> PowerSums:
    """Power sums of ``samples`` independent ``Y^(n)`` vectors and their mixing draws."""

    def work(index: int, rows: int):
        gen = chunk_generator(seed, stream, n, index)
        sums = power_sums(gen.bit_generator, n, rows, p, q, k=k, backend=backend)
        w = np.asarray(sample_mixing(law, gen, rows), dtype=float)
        return sums, w

    parts = map_chunks(work, chunk_layout(n, samples), threads)
    sums = np.concatenate([s for s, _ in parts])
    w = np.concatenate([w for _, w in parts])
    return PowerSums(sums[:, 0].copy(), sums[:, 1].copy(), sums[:, 2].copy(), w)


def chunked_summary(values: np.ndarray, n: int) -> MomentSummary:
    """Merge per-chunk summaries of ``values`` in chunk order."""
    out = MomentSummary()
    start = 0
    for rows in chunk_layout(n, values.size):
        out = merge(out, MomentSummary.from_array(values[start : start + rows]))
        start += rows
    return out
