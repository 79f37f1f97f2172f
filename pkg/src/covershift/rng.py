"""Reproducible random-number streams with cheap, collision-free substreams.

Every stochastic routine in this package receives an :class:`RngStream`, a
value object identified by a 64-bit seed plus a path of indices.  Deriving a
substream extends the path; identical ``(seed, path)`` pairs always yield the
identical draw sequence, and distinct paths yield statistically independent
generators.  Streams are immutable and safe to share across threads or
processes: parallel replicates simply derive one child per replicate index.

The concrete generator is PCG64 keyed through ``numpy.random.SeedSequence``
with the path as the spawn key, so substreams are derived directly rather
than by skipping ahead in a single sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_UINT64_MAX = 2**64 - 1


@dataclass(frozen=True)
class RngStream:
    """Immutable handle for a deterministic random substream."""

    seed: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not (0 <= int(self.seed) <= _UINT64_MAX):
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        for ix in self.path:
            if not (0 <= int(ix) <= _UINT64_MAX):
                raise DomainError(f"path indices must be 64-bit unsigned integers, got {ix!r}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "path", tuple(int(ix) for ix in self.path))

    def child(self, *indices: int) -> "RngStream":
        """Derive the substream at ``path + indices``."""
        return RngStream(self.seed, self.path + indices)

    def generator(self) -> np.random.Generator:
        """Instantiate the numpy generator for this stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.PCG64(ss))


def sample_std_normal(stream: RngStream, count: int) -> np.ndarray:
    """Draw ``count`` i.i.d. standard-normal variates, deterministic in the stream.

    Parameters
    ----------
    stream : RngStream
        Substream to draw from; the same stream always returns the same values.
    count : int
        Number of draws, at least 1.
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return stream.generator().standard_normal(count)
