"""Counter-based random streams for reproducible serial and parallel Monte Carlo.

Each stream is identified by a (seed, stream_id) pair feeding the key of a
Philox counter-based bit generator.  Distinct stream ids give statistically
independent sequences, and the same pair always reproduces the same bits, so
ensembles can assign stream_id = trajectory index and stay reproducible under
any execution order or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_U64 = np.uint64


@dataclass(frozen=True)
class RngStream:
    """Handle for one reproducible substream.

    Two streams with the same (seed, stream_id) produce bit-identical output;
    different stream ids are independent for all practical purposes.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if not (0 <= int(self.stream_id) < 2**64):
            raise ValueError("stream_id must fit in an unsigned 64-bit integer")

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)

    def generator(self) -> np.random.Generator:
        """Fresh numpy Generator positioned at the start of this stream."""
        key = np.array([self.seed, self.stream_id], dtype=_U64)
        return np.random.Generator(np.random.Philox(key=key))
