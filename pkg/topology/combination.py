"""
First moment of the random combination matrix and its Perron vector.
"""

import numpy as np

from helpers.constants import PERRON_TOL
from helpers.errors import ModeError, NotPrimitive
from models.network import Mode, NetworkSpec, PerronResult
from sampler.law import ParticipationLaw


class CombinationMoments:
    """Expected combination matrix E[A_T] and the Perron eigenvector p̄."""

    @staticmethod
    def expected_combination(spec: NetworkSpec) -> np.ndarray:
        """
        Closed-form E[A_T] for decentralized and fedsgd networks.

        Off-diagonal (l, k): a_{lk}·q_k·q_{lk}. Diagonal (k, k):
        1 − q_k·Σ_{m∈N_k\\{k}} a_{mk}·q_{mk}.

        Raises:
            ModeError: fedavg (use expected_fedavg_combination)
        """
        if spec.mode == Mode.FEDAVG:
            raise ModeError("Closed-form expectation applies to decentralized and fedsgd only")

        mask = np.zeros((spec.K, spec.K), dtype=bool)
        for k in range(spec.K):
            mask[spec.others(k), k] = True
        off = np.where(mask, spec.A * spec.Q, 0.0) * spec.q[None, :]
        E = off.copy()
        E[np.diag_indices(spec.K)] = 1.0 - off.sum(axis=0)
        return E

    @staticmethod
    def expected_fedavg_combination(spec: NetworkSpec) -> np.ndarray:
        """Exact E[A_T] for fedavg from the participant-set law."""
        if spec.mode != Mode.FEDAVG:
            raise ModeError("expected_fedavg_combination needs a fedavg network")
        return ParticipationLaw(spec.q).expected_matrix()

    @staticmethod
    def mean_matrix(spec: NetworkSpec) -> np.ndarray:
        """E[A_T] for any mode."""
        if spec.mode == Mode.FEDAVG:
            return CombinationMoments.expected_fedavg_combination(spec)
        return CombinationMoments.expected_combination(spec)

    @staticmethod
    def perron(mat: np.ndarray) -> PerronResult:
        """
        Perron eigenvector of a left-stochastic matrix.

        Eigenvalue 1 must be simple and strictly dominant (|λ₂| < 1), which
        is the numerical signature of a primitive expected network. p̄ is the
        solution of (mat − I)p = 0, 1ᵀp = 1, refined by power steps.

        Raises:
            NotPrimitive: eigenvalue 1 repeated, another eigenvalue on the
                unit circle, or a non-positive Perron entry
        """
        mat = np.asarray(mat, dtype=float)
        K = mat.shape[0]
        magnitudes = np.sort(np.abs(np.linalg.eigvals(mat)))[::-1]
        eigengap = float(magnitudes[1]) if K > 1 else 0.0
        if eigengap > 1.0 - 1e-9:
            raise NotPrimitive(
                f"Second eigenvalue magnitude {eigengap:.12f} is on the unit circle; "
                "expected network is disconnected or periodic"
            )

        system = np.vstack([mat - np.eye(K), np.ones((1, K))])
        rhs = np.concatenate([np.zeros(K), [1.0]])
        pbar, *_ = np.linalg.lstsq(system, rhs, rcond=None)
        for _ in range(10):
            pbar = mat @ pbar
            pbar = pbar / pbar.sum()

        if np.any(pbar <= 0.0):
            raise NotPrimitive("Perron vector has non-positive entries")
        residual = float(np.max(np.abs(mat @ pbar - pbar)))
        if residual > PERRON_TOL:
            raise NotPrimitive(f"Perron fixed-point residual {residual:.3e} above tolerance")

        return PerronResult(pbar=pbar, eigengap=eigengap)
