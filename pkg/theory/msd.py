"""
Steady-state MSD of the error recursion at combine instants.

With X = 𝒢_T·𝒢ₜ^{T−1}, b = bvec(diag{R_k}) and the local noise sum
s = Σ_{j=1}^{T−1} 𝒢ₜ^{j−1} 𝒞ₜ b, two evaluations are offered:

    recursion:  σ = (I − X)⁻¹ (𝒞_T^fwd b + 𝒢_T s),     MSD = (1/K) bvec(I)ᵀ σ
    adjoint:    z = (I − Xᵀ)⁻¹ ((I + Xᵀ) 𝒞_T b + 𝒢_Tᵀ s), MSD = (1/K) zᵀ bvec(I)

The recursion form is the fixed point of the forward covariance recursion
and is what the simulator measures. The adjoint form counts the combine-step
noise twice, so for T = 1 it sits about 3 dB above the recursion form.
"""

from logging import Logger
from typing import Optional

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla

from config import Config
from helpers.errors import UnstableSpectrum
from helpers.utils import to_db
from models.moments import MomentMatrices, StabilityReport, TheoryReport
from models.schedule import Schedule
from theory.calculus import BlockCalculus

MSD_FORMS = ("recursion", "adjoint")

# rows above which full eigendecomposition is replaced by Arnoldi
EIGVALS_LIMIT = 1500
# rows above which dense operators trigger a memory warning
LARGE_ROWS = 2500


class MSDAnalyzer:
    """Evaluate the steady-state MSD and the spectral radius of X."""

    @staticmethod
    def _local_noise_sum(moments: MomentMatrices, blocks: np.ndarray, b: np.ndarray, T: int) -> np.ndarray:
        step = moments.mu**2 * moments.local.c @ b
        total = np.zeros_like(b)
        for _ in range(T - 1):
            total += step
            step = BlockCalculus.apply_blocks(blocks, step)
        return total

    @staticmethod
    def spectral_radius(moments: MomentMatrices, sched: Schedule, dense_limit: Optional[int] = None) -> float:
        """ρ(𝒢_T·𝒢ₜ^{T−1})."""
        return MSDAnalyzer._evaluate(moments, sched, dense_limit, need_msd=False)["rho"]

    @staticmethod
    def _evaluate(
        moments: MomentMatrices,
        sched: Schedule,
        dense_limit: Optional[int],
        need_msd: bool = True,
        logger: Optional[Logger] = None,
    ) -> dict:
        K, M, mu, T = moments.K, moments.M, moments.mu, sched.T
        K2, M2 = K * K, M * M
        rows = K2 * M2
        dense_limit = Config.DENSE_LIMIT if dense_limit is None else dense_limit
        dense = rows <= dense_limit

        blocks = BlockCalculus.local_blocks(moments.local, moments.hessians, mu)
        power = BlockCalculus.block_power(blocks, T - 1)
        terms = BlockCalculus.kron_terms(moments.hessians)
        combine = moments.combine

        def x_apply(v):
            Y = BlockCalculus.apply_blocks(power, v.reshape(K2, M2))
            return BlockCalculus.apply_transition(combine, terms, mu, Y).ravel()

        def xt_apply(v):
            Y = BlockCalculus.apply_transition_transposed(combine, terms, mu, v.reshape(K2, M2))
            return BlockCalculus.apply_blocks(power, Y, transpose=True).ravel()

        if logger and rows > LARGE_ROWS:
            logger.warning(
                "⚠️ Moment operators have %d rows (%s path)", rows, "dense" if dense else "matrix-free"
            )

        X = None
        if dense:
            G4 = BlockCalculus.transition_blocks(combine, moments.hessians, mu)
            X = np.einsum("rcij,cjk->rick", G4, power).reshape(rows, rows)
            del G4

        if rows <= EIGVALS_LIMIT and X is not None:
            rho = float(np.max(np.abs(np.linalg.eigvals(X))))
        else:
            op = X if X is not None else spla.LinearOperator((rows, rows), matvec=x_apply, dtype=float)
            rho = float(np.max(np.abs(spla.eigs(op, k=1, which="LM", return_eigenvectors=False))))

        result = {"rho": rho}
        if not need_msd:
            return result
        if rho >= 1.0:
            raise UnstableSpectrum(rho)

        b = BlockCalculus.noise_blocks(moments.R_blocks)
        ident = BlockCalculus.identity_blocks(K, M).ravel()
        local_sum = MSDAnalyzer._local_noise_sum(moments, blocks, b, T)

        forward = (mu**2 * combine.t11 @ b).ravel()
        rhs_rec = forward + BlockCalculus.apply_transition(combine, terms, mu, local_sum).ravel()
        combine_noise = (mu**2 * combine.c @ b).ravel()
        rhs_adjoint = (
            combine_noise
            + xt_apply(combine_noise)
            + BlockCalculus.apply_transition_transposed(combine, terms, mu, local_sum).ravel()
        )

        if not np.any(b):
            sigma = np.zeros(rows)
            z = np.zeros(rows)
        elif X is not None:
            X *= -1.0
            X[np.diag_indices(rows)] += 1.0
            lu = la.lu_factor(X, overwrite_a=True, check_finite=False)
            sigma = la.lu_solve(lu, rhs_rec)
            z = la.lu_solve(lu, rhs_adjoint, trans=1)
        else:
            sigma = MSDAnalyzer._iterative_solve(lambda v: v - x_apply(v), rhs_rec, rows, logger)
            z = MSDAnalyzer._iterative_solve(lambda v: v - xt_apply(v), rhs_adjoint, rows, logger)

        result["recursion"] = max(float(ident @ sigma) / K, 0.0)
        result["adjoint"] = max(float(z @ ident) / K, 0.0)
        return result

    @staticmethod
    def _iterative_solve(matvec, rhs: np.ndarray, rows: int, logger: Optional[Logger]) -> np.ndarray:
        op = spla.LinearOperator((rows, rows), matvec=matvec, dtype=float)
        solution, info = spla.gmres(op, rhs, rtol=1e-12, atol=0.0, restart=100, maxiter=200)
        if info != 0 and logger:
            logger.warning("⚠️ GMRES stopped before convergence (info=%d)", info)
        return solution

    @staticmethod
    def theoretical_msd(
        moments: MomentMatrices,
        sched: Schedule,
        stability: Optional[StabilityReport] = None,
        form: str = "recursion",
        alpha_s: float = 1.0,
        dense_limit: Optional[int] = None,
        logger: Optional[Logger] = None,
    ) -> TheoryReport:
        """
        Steady-state MSD at combine instants.

        Args:
            moments: local and combine moment tables
            sched: schedule providing T
            stability: optional step-size report merged into the result
            form: "recursion" or "adjoint", selects msd_lin/msd_db
            alpha_s: remainder exponent, α₀ = ½·min(1, α_s)
            dense_limit: largest row count assembled densely
            logger: optional logger

        Returns:
            TheoryReport with both MSD forms

        Raises:
            UnstableSpectrum: ρ(𝒢_T·𝒢ₜ^{T−1}) >= 1
            ValueError: unknown form
        """
        if form not in MSD_FORMS:
            raise ValueError(f"form must be one of {MSD_FORMS}, got {form!r}")

        values = MSDAnalyzer._evaluate(moments, sched, dense_limit, logger=logger)
        chosen = values[form]
        if logger:
            logger.info(
                "📐 MSD %.3f dB (%s form), rho=%.6f", to_db(chosen), form, values["rho"]
            )

        return TheoryReport(
            msd_lin=chosen,
            msd_db=to_db(chosen),
            msd_form=form,
            msd_recursion_lin=values["recursion"],
            msd_recursion_db=to_db(values["recursion"]),
            msd_adjoint_lin=values["adjoint"],
            msd_adjoint_db=to_db(values["adjoint"]),
            gamma=stability.gamma if stability else None,
            mu_max=stability.mu_max if stability else None,
            msd_bound=stability.msd_bound if stability else None,
            admissible=stability.admissible if stability else None,
            rho=values["rho"],
            alpha0=0.5 * min(1.0, alpha_s),
            K=moments.K,
            M=moments.M,
            T=sched.T,
            mu=moments.mu,
            mode=moments.mode,
            exact=moments.exact,
            max_std_error=moments.max_std_error,
        )
