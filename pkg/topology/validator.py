import numpy as np

from helpers.constants import STOCHASTIC_TOL
from helpers.errors import (
    ColumnSumError,
    ModeError,
    NegativeWeight,
    NeighborhoodMismatch,
)
from models.network import Mode, NetworkSpec


class NetworkValidator:
    """Check the structural invariants of a NetworkSpec."""

    @staticmethod
    def validate_network(spec: NetworkSpec) -> NetworkSpec:
        """
        Return ``spec`` if every invariant holds.

        Checks, in order: mode constraints, nonnegative weights, support inside
        the neighbourhoods, unit column sums (tolerance 1e-12).

        Raises:
            ModeError: federated mode with partial neighbourhoods or q_{lk} != 1
                (fedsgd also requires q_k = 1)
            NegativeWeight: some a_{lk} < 0
            NeighborhoodMismatch: a_{lk} > 0 with l outside N_k
            ColumnSumError: a column deviates from 1 by more than 1e-12
        """
        K = spec.K
        A = spec.A

        if spec.mode in (Mode.FEDSGD, Mode.FEDAVG):
            if any(len(hood) != K for hood in spec.neighborhoods):
                raise ModeError(f"{spec.mode.value} requires full neighbourhoods")
            if not np.all(spec.Q == 1.0):
                raise ModeError(f"{spec.mode.value} requires all sampling probabilities q_lk = 1")
            if spec.mode == Mode.FEDSGD and not np.all(spec.q == 1.0):
                raise ModeError("fedsgd requires every participation probability q_k = 1")

        negative = np.argwhere(A < 0.0)
        if negative.size:
            row, col = negative[0]
            raise NegativeWeight(int(row), int(col), float(A[row, col]))

        for k, hood in enumerate(spec.neighborhoods):
            outside = np.ones(K, dtype=bool)
            outside[hood] = False
            rows = np.flatnonzero(outside & (A[:, k] > 0.0))
            if rows.size:
                raise NeighborhoodMismatch(int(rows[0]), k)

        sums = A.sum(axis=0)
        bad = np.flatnonzero(np.abs(sums - 1.0) > STOCHASTIC_TOL)
        if bad.size:
            raise ColumnSumError(int(bad[0]), float(sums[bad[0]]))

        return spec
