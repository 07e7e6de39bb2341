"""
Random streams.

All randomness comes from numpy PCG64 generators seeded through
SeedSequence(master_seed, spawn_key=key). Keys:

    (0,)            topology (graph, sampling probabilities)
    (1,)            problem data (w*, features, noise)
    (2, run, i)     run ``run``, global iteration ``i`` (realization, then mini-batches)
    (3,)            Monte-Carlo moment estimates
"""

import numpy as np

from helpers.constants import RNG_NAME


class Streams:
    TOPOLOGY = 0
    PROBLEM = 1
    RUN = 2
    ORACLE = 3

    name = RNG_NAME

    @staticmethod
    def generator(seed: int, *key: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))

    @staticmethod
    def topology(seed: int) -> np.random.Generator:
        return Streams.generator(seed, Streams.TOPOLOGY)

    @staticmethod
    def problem(seed: int) -> np.random.Generator:
        return Streams.generator(seed, Streams.PROBLEM)

    @staticmethod
    def iteration(seed: int, run: int, i: int) -> np.random.Generator:
        return Streams.generator(seed, Streams.RUN, run, i)

    @staticmethod
    def oracle(seed: int) -> np.random.Generator:
        return Streams.generator(seed, Streams.ORACLE)
