"""
Block calculus for K×K-block matrices with M×M blocks.

bvec order: block-column k' major, then block-row k, then the column-major
vectorization of block Σ_{k k'}. The block Kronecker product is fixed by

    bvec(B Σ Aᵀ) = (A ⊗_b B) bvec(Σ)

so block ((k', k), (l', l)) of A ⊗_b B is kron(A_{k'l'}, B_{kl}).
"""

from typing import Tuple

import numpy as np

from helpers.errors import ShapeError
from models.moments import MomentTables


class BlockCalculus:
    """bvec, ⊗_b and assembly of the factored moment operators."""

    @staticmethod
    def _check_square(mat: np.ndarray, K: int, M: int, name: str) -> np.ndarray:
        mat = np.asarray(mat, dtype=float)
        if mat.shape != (K * M, K * M):
            raise ShapeError(f"{name} must be {K * M}x{K * M}, got {mat.shape}")
        return mat

    @staticmethod
    def bvec(S: np.ndarray, K: int, M: int) -> np.ndarray:
        """Block vectorization of a KM×KM matrix."""
        S = BlockCalculus._check_square(S, K, M, "Sigma")
        return S.reshape(K, M, K, M).transpose(2, 0, 3, 1).ravel()

    @staticmethod
    def unbvec(v: np.ndarray, K: int, M: int) -> np.ndarray:
        """Inverse of bvec."""
        v = np.asarray(v, dtype=float)
        if v.shape != ((K * M) ** 2,):
            raise ShapeError(f"Expected a vector of {(K * M) ** 2} entries, got {v.shape}")
        return v.reshape(K, K, M, M).transpose(1, 3, 0, 2).reshape(K * M, K * M)

    @staticmethod
    def block_kron(A: np.ndarray, B: np.ndarray, K: int, M: int) -> np.ndarray:
        """A ⊗_b B as a (KM)²×(KM)² matrix."""
        A = BlockCalculus._check_square(A, K, M, "A")
        B = BlockCalculus._check_square(B, K, M, "B")
        out = np.einsum("xayb,zcwd->xzacywbd", A.reshape(K, M, K, M), B.reshape(K, M, K, M))
        n = (K * M) ** 2
        return out.reshape(n, n)

    @staticmethod
    def kron_terms(hessians: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Per column pair c = (l', l): kron(H_{l'}, I), kron(I, H_l), kron(H_{l'}, H_l).

        Returns:
            Three arrays of shape (K², M², M²)
        """
        hessians = np.asarray(hessians, dtype=float)
        K, M, _ = hessians.shape
        eye = np.eye(M)
        left = np.einsum("pab,cd->pacbd", hessians, eye).reshape(K, M * M, M * M)
        right = np.einsum("ab,pcd->pacbd", eye, hessians).reshape(K, M * M, M * M)
        both = np.einsum("pab,qcd->pqacbd", hessians, hessians).reshape(K * K, M * M, M * M)
        left = np.repeat(left, K, axis=0)
        right = np.tile(right, (K, 1, 1))
        return left, right, both

    @staticmethod
    def transition_blocks(tables: MomentTables, hessians: np.ndarray, mu: float) -> np.ndarray:
        """
        Transition operator as a (K², K², M², M²) block array:
        t00·I − μ t10 (H_{l'}⊗I) − μ t01 (I⊗H_l) + μ² t11 (H_{l'}⊗H_l).
        """
        left, right, both = BlockCalculus.kron_terms(hessians)
        M2 = left.shape[1]
        out = np.einsum("rc,ij->rcij", tables.t00, np.eye(M2))
        out -= mu * np.einsum("rc,cij->rcij", tables.t10, left)
        out -= mu * np.einsum("rc,cij->rcij", tables.t01, right)
        out += mu**2 * np.einsum("rc,cij->rcij", tables.t11, both)
        return out

    @staticmethod
    def assemble_transition(tables: MomentTables, hessians: np.ndarray, mu: float) -> np.ndarray:
        """Dense (KM)²×(KM)² transition operator."""
        blocks = BlockCalculus.transition_blocks(tables, hessians, mu)
        K2, _, M2, _ = blocks.shape
        return blocks.transpose(0, 2, 1, 3).reshape(K2 * M2, K2 * M2)

    @staticmethod
    def assemble_noise(table: np.ndarray, M: int, mu: float) -> np.ndarray:
        """Dense noise operator μ²·table ⊗ I_{M²}."""
        return np.kron(mu**2 * np.asarray(table, dtype=float), np.eye(M * M))

    @staticmethod
    def local_blocks(tables: MomentTables, hessians: np.ndarray, mu: float) -> np.ndarray:
        """
        Diagonal M²×M² blocks of a block-diagonal transition operator.

        Raises:
            ShapeError: tables have off-diagonal mass
        """
        for name in ("t00", "t10", "t01", "t11"):
            table = getattr(tables, name)
            if np.any(table - np.diag(np.diag(table))):
                raise ShapeError(f"Local table {name} is not diagonal")
        left, right, both = BlockCalculus.kron_terms(hessians)
        M2 = left.shape[1]
        eye = np.eye(M2)
        return (
            np.diag(tables.t00)[:, None, None] * eye
            - mu * np.diag(tables.t10)[:, None, None] * left
            - mu * np.diag(tables.t01)[:, None, None] * right
            + mu**2 * np.diag(tables.t11)[:, None, None] * both
        )

    @staticmethod
    def block_power(blocks: np.ndarray, power: int) -> np.ndarray:
        """Per-block matrix power of a stacked block-diagonal operator."""
        if power == 0:
            return np.broadcast_to(np.eye(blocks.shape[1]), blocks.shape).copy()
        return np.linalg.matrix_power(blocks, power)

    @staticmethod
    def apply_transition(
        tables: MomentTables, terms: Tuple[np.ndarray, np.ndarray, np.ndarray], mu: float, Y: np.ndarray
    ) -> np.ndarray:
        """Transition operator applied to Y laid out as (K², M²), without assembling it."""
        left, right, both = terms
        return (
            tables.t00 @ Y
            - mu * tables.t10 @ np.einsum("cij,cj->ci", left, Y)
            - mu * tables.t01 @ np.einsum("cij,cj->ci", right, Y)
            + mu**2 * tables.t11 @ np.einsum("cij,cj->ci", both, Y)
        )

    @staticmethod
    def apply_transition_transposed(
        tables: MomentTables, terms: Tuple[np.ndarray, np.ndarray, np.ndarray], mu: float, Y: np.ndarray
    ) -> np.ndarray:
        """Transposed transition operator applied to Y laid out as (K², M²)."""
        left, right, both = terms
        return (
            tables.t00.T @ Y
            - mu * np.einsum("cji,cj->ci", left, tables.t10.T @ Y)
            - mu * np.einsum("cji,cj->ci", right, tables.t01.T @ Y)
            + mu**2 * np.einsum("cji,cj->ci", both, tables.t11.T @ Y)
        )

    @staticmethod
    def apply_blocks(blocks: np.ndarray, Y: np.ndarray, transpose: bool = False) -> np.ndarray:
        """Block-diagonal operator applied to Y laid out as (K², M²)."""
        return np.einsum("cji,cj->ci" if transpose else "cij,cj->ci", blocks, Y)

    @staticmethod
    def noise_blocks(R_blocks: np.ndarray) -> np.ndarray:
        """bvec(diag{R_k}) laid out as (K², M²): row c = (l', l) holds vec(R_l) when l' = l."""
        R_blocks = np.asarray(R_blocks, dtype=float)
        K, M, _ = R_blocks.shape
        out = np.zeros((K, K, M * M))
        out[np.arange(K), np.arange(K)] = R_blocks.transpose(0, 2, 1).reshape(K, M * M)
        return out.reshape(K * K, M * M)

    @staticmethod
    def identity_blocks(K: int, M: int) -> np.ndarray:
        """bvec(I_{KM}) laid out as (K², M²)."""
        return BlockCalculus.noise_blocks(np.broadcast_to(np.eye(M), (K, M, M)))
