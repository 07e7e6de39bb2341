"""
Exact participant-set law for federated averaging.

Participation indicators θ_k are independent Bernoulli(q_k), so the number of
participants L is Poisson-binomial. Every fedavg moment reduces to

    E[ Π_{i∈on} θ_i · Π_{j∈off} (1 − θ_j) · L^{-p} ]

which factors into the probability of the forced pattern times a
Poisson-binomial expectation over the remaining agents.
"""

from functools import lru_cache
from typing import FrozenSet

import numpy as np


def poisson_binomial_pmf(probs: np.ndarray) -> np.ndarray:
    """P(Σθ = n) for n = 0..len(probs), by the standard convolution recursion."""
    pmf = np.zeros(len(probs) + 1)
    pmf[0] = 1.0
    for i, p in enumerate(probs):
        pmf[1 : i + 2] = pmf[1 : i + 2] * (1.0 - p) + pmf[: i + 1] * p
        pmf[0] *= 1.0 - p
    return pmf


class ParticipationLaw:
    """Moments of the fedavg participant set for a fixed q vector."""

    def __init__(self, q: np.ndarray):
        self.q = np.asarray(q, dtype=float)
        self.K = self.q.shape[0]
        self.exchangeable = bool(np.all(self.q == self.q[0])) if self.K else True
        self._moment = lru_cache(maxsize=None)(self._moment_uncached)

    def moment(self, on: FrozenSet[int], off: FrozenSet[int], power: int) -> float:
        """
        E[Π_on θ · Π_off (1 − θ) · L^{-power}], with L^{-p} read as 0 when L = 0.
        """
        if on & off:
            return 0.0
        if self.exchangeable:
            # only the pattern sizes matter
            n_on, n_off = len(on), len(off)
            on = frozenset(range(n_on))
            off = frozenset(range(n_on, n_on + n_off))
        return self._moment(frozenset(on), frozenset(off), int(power))

    def _moment_uncached(self, on: FrozenSet[int], off: FrozenSet[int], power: int) -> float:
        prob = float(np.prod(self.q[list(on)])) * float(np.prod(1.0 - self.q[list(off)]))
        if prob == 0.0:
            return 0.0
        if power == 0:
            return prob
        rest = np.ones(self.K, dtype=bool)
        rest[list(on | off)] = False
        pmf = poisson_binomial_pmf(self.q[rest])
        totals = len(on) + np.arange(pmf.shape[0])
        with np.errstate(divide="ignore"):
            weights = np.where(totals > 0, 1.0 / np.maximum(totals, 1) ** power, 0.0)
        return prob * float(pmf @ weights)

    def expected_matrix(self) -> np.ndarray:
        """E[A_combine] for fedavg: off-diagonal E[θ_lθ_k/L], diagonal E[θ_k/L] + 1 − q_k."""
        K = self.K
        E = np.zeros((K, K))
        for k in range(K):
            for l in range(K):
                if l == k:
                    E[k, k] = self.moment(frozenset({k}), frozenset(), 1) + 1.0 - self.q[k]
                else:
                    E[l, k] = self.moment(frozenset({l, k}), frozenset(), 1)
        return E
