# -*- coding: utf-8 -*-
"""
Counter-based random streams.

Every (seed, replication, stream, point) key maps to its own Philox generator
through a SeedSequence spawn key, so a stream is reproducible no matter in
which order replications or parameter points are evaluated. ``point`` stays 0
for common random numbers and differs per parameter point otherwise.
"""
import numpy as np

ARRIVAL_STREAM = 0
SERVICE_STREAM = 1
PROBE_STREAM = 2


def make_stream(
    seed: int, replication: int, stream_id: int, point: int = 0
) -> np.random.Generator:
    """Philox generator of one stream"""
    seq = np.random.SeedSequence(
        int(seed), spawn_key=(int(replication), int(stream_id), int(point))
    )
    return np.random.Generator(np.random.Philox(seq))


def draw_uniforms(
    seed: int, replication: int, stream_id: int, count: int, point: int = 0
) -> np.ndarray:
    """count uniforms on [0, 1)"""
    return make_stream(seed, replication, stream_id, point).random(int(count))
