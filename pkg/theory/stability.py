"""
Step-size bound and mean-square contraction rate.
"""

from typing import Optional

import numpy as np

from models.moments import StabilityReport
from models.network import NetworkSpec
from models.problem import RegularityConstants
from models.schedule import Schedule


class StabilityAnalyzer:
    @staticmethod
    def stability_report(
        constants: RegularityConstants,
        spec: NetworkSpec,
        sched: Schedule,
        beta_s2: float = 0.0,
        sigma_s2: Optional[float] = None,
    ) -> StabilityReport:
        """
        μ_max = 2λ_min/(λ_max² + β_s²) and
        γ = max_k 1 − 2μq_kλ_min + μ²q_k(λ_max² + β_s²).

        γ is admissible when 0 <= γ < 1; the steady-state bound σ_s²μ²/(1−γ)
        is reported only then.

        Args:
            constants: curvature constants
            spec: network (participation probabilities q_k)
            sched: schedule (μ)
            beta_s2: gradient-noise slope β_s²
            sigma_s2: gradient-noise floor σ_s², enables the bound

        Returns:
            StabilityReport
        """
        lam_min = constants.lambda_min
        curvature = constants.lambda_max**2 + beta_s2
        mu = sched.mu
        q = np.asarray(spec.q, dtype=float)

        mu_max = 2.0 * lam_min / curvature
        gamma = float(np.max(1.0 - 2.0 * mu * q * lam_min + mu**2 * q * curvature))
        admissible = 0.0 <= gamma < 1.0

        bound = None
        if admissible and sigma_s2 is not None:
            bound = sigma_s2 * mu**2 / (1.0 - gamma)

        return StabilityReport(mu_max=mu_max, gamma=gamma, admissible=admissible, msd_bound=bound)
