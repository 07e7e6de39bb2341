"""
Exact moment tables of the random combination step and the local steps.

Table entries are indexed by r = k'·K + k and c = l'·K + l:

    t_ab[r, c] = E[a_{l'k'} θ_{l'}^a · a_{lk} θ_l^b]
    c[r, c]    = E[a_{k'l'} θ_{l'} · a_{kl} θ_l]

Decentralized: column m of A_combine and θ_m are owned by agent m and
agents draw independently, so every entry factors over the distinct owners
of its atoms. Owner moments come from enumerating agent m's events
(θ_m = 0, or θ_m = 1 with one of 2^{n_m} neighbour subsets).

fedavg: a_{xk} = θ_xθ_k/L + δ_{xk}(1 − θ_k); products expand into terms
E[Π θ · Π (1 − θ) · L^{-p}] given by the participant-set law.
"""

from logging import Logger
from typing import Dict, List, Optional, Tuple

import numpy as np

from config import Config
from helpers.errors import EnumerationCapExceeded
from models.moments import MomentMatrices, MomentTables
from models.network import Mode, NetworkSpec
from models.schedule import Schedule
from sampler.law import ParticipationLaw

# subset rows evaluated per vectorized chunk
ENUMERATION_CHUNK = 1 << 16

OwnerMoments = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


class MomentBuilder:
    """Build the local and combine moment tables of the error recursion."""

    @staticmethod
    def build_local_moments(spec: NetworkSpec) -> MomentTables:
        """
        Tables of a local step (A = I): diagonal with t00 = 1, t10 = q_{l'},
        t01 = q_l and t11 = c = E[θ_{l'}θ_l].
        """
        K = spec.K
        q = spec.q
        joint = np.outer(q, q)
        joint[np.diag_indices(K)] = q
        pair_l = np.repeat(q, K)
        pair_r = np.tile(q, K)
        return MomentTables(
            t00=np.eye(K * K),
            t10=np.diag(pair_l),
            t01=np.diag(pair_r),
            t11=np.diag(joint.ravel()),
            c=np.diag(joint.ravel()),
        )

    @staticmethod
    def event_count(spec: NetworkSpec, agent: int) -> int:
        return 1 + 2 ** len(spec.others(agent))

    @staticmethod
    def owner_moments(spec: NetworkSpec, agent: int, cap: int) -> OwnerMoments:
        """
        Enumerate agent ``agent``'s events.

        Returns:
            (E[a_x], E[a_x θ], E[a_x a_y], E[a_x a_y θ]) over rows x, y of the
            agent's column

        Raises:
            EnumerationCapExceeded: 1 + 2^{n} events above ``cap``
        """
        K = spec.K
        events = MomentBuilder.event_count(spec, agent)
        if events > cap:
            raise EnumerationCapExceeded(agent, events, cap)

        nb = np.asarray(spec.others(agent), dtype=np.int64)
        n = nb.size
        probs_on = spec.Q[nb, agent]
        weights = spec.A[nb, agent]

        first = np.zeros(K)
        second = np.zeros((K, K))
        total = 1 << n
        for start in range(0, total, ENUMERATION_CHUNK):
            codes = np.arange(start, min(start + ENUMERATION_CHUNK, total), dtype=np.int64)
            bits = ((codes[:, None] >> np.arange(n)) & 1).astype(bool)
            probs = np.prod(np.where(bits, probs_on, 1.0 - probs_on), axis=1)
            cols = np.zeros((codes.size, K))
            cols[:, nb] = bits * weights
            cols[:, agent] = np.clip(1.0 - cols.sum(axis=1), 0.0, 1.0)
            first += probs @ cols
            second += np.einsum("n,nx,ny->xy", probs, cols, cols)

        q = spec.q[agent]
        first_on = q * first
        second_on = q * second
        e = np.zeros(K)
        e[agent] = 1.0
        return (
            first_on + (1.0 - q) * e,
            first_on,
            second_on + (1.0 - q) * np.outer(e, e),
            second_on,
        )

    @staticmethod
    def _decentralized_tables(spec: NetworkSpec, cap: int) -> MomentTables:
        K = spec.K
        owners = [MomentBuilder.owner_moments(spec, m, cap) for m in range(K)]
        E1 = np.stack([o[0] for o in owners])
        E1t = np.stack([o[1] for o in owners])
        E2 = np.stack([o[2] for o in owners])
        E2t = np.stack([o[3] for o in owners])
        q = spec.q

        idx = np.arange(K)
        KP = idx[:, None, None, None]
        KK = idx[None, :, None, None]
        LP = idx[None, None, :, None]
        LL = idx[None, None, None, :]
        shape = (K, K, K, K)

        def theta_factor(rem_lp, rem_l):
            both = rem_lp & rem_l & (LP == LL)
            separate = np.where(rem_lp, q[LP], 1.0) * np.where(rem_l, q[LL], 1.0)
            return np.where(both, q[LP], separate)

        def table(a: bool, b: bool) -> np.ndarray:
            # atoms: a_{l'k'} (owner k'), θ_{l'} (owner l'), a_{lk} (owner k), θ_l (owner l)
            th_lp = np.full(shape, a)
            th_l = np.full(shape, b)

            same = np.broadcast_to(KP == KK, shape)
            joins = (th_lp & (LP == KP)) | (th_l & (LL == KP))
            f_same = np.where(joins, E2t[KP, LP, LL], E2[KP, LP, LL])
            g_same = theta_factor(th_lp & (LP != KP), th_l & (LL != KP))

            joins_kp = (th_lp & (LP == KP)) | (th_l & (LL == KP))
            joins_k = (th_lp & (LP == KK)) | (th_l & (LL == KK))
            f_kp = np.where(joins_kp, E1t[KP, LP], E1[KP, LP])
            f_k = np.where(joins_k, E1t[KK, LL], E1[KK, LL])
            g_diff = theta_factor(
                th_lp & (LP != KP) & (LP != KK), th_l & (LL != KP) & (LL != KK)
            )
            out = np.where(same, f_same * g_same, f_kp * f_k * g_diff)
            return out.reshape(K * K, K * K)

        # c[(k',k),(l',l)] = E[a_{k'l'}θ_{l'} a_{kl}θ_l]; each factor has a single owner
        pair = np.where(
            np.broadcast_to(LP == LL, shape),
            E2t[LP, KP, KK],
            E1t[LP, KP] * E1t[LL, KK],
        ).reshape(K * K, K * K)

        return MomentTables(
            t00=table(False, False),
            t10=table(True, False),
            t01=table(False, True),
            t11=table(True, True),
            c=pair,
        )

    @staticmethod
    def _fedavg_terms(x: int, k: int) -> List[Tuple[frozenset, frozenset, int]]:
        terms = [(frozenset({x, k}), frozenset(), 1)]
        if x == k:
            terms.append((frozenset(), frozenset({k}), 0))
        return terms

    @staticmethod
    def _fedavg_tables(spec: NetworkSpec) -> MomentTables:
        K = spec.K
        law = ParticipationLaw(spec.q)
        tables: Dict[str, np.ndarray] = {
            name: np.zeros((K * K, K * K)) for name in ("t00", "t10", "t01", "t11", "c")
        }
        flags = {"t00": (False, False), "t10": (True, False), "t01": (False, True), "t11": (True, True)}

        for kp in range(K):
            for k in range(K):
                r = kp * K + k
                for lp in range(K):
                    left = MomentBuilder._fedavg_terms(lp, kp)
                    for l in range(K):
                        c = lp * K + l
                        right = MomentBuilder._fedavg_terms(l, k)
                        for name, (a, b) in flags.items():
                            extra = set()
                            if a:
                                extra.add(lp)
                            if b:
                                extra.add(l)
                            total = 0.0
                            for on1, off1, p1 in left:
                                for on2, off2, p2 in right:
                                    total += law.moment(on1 | on2 | extra, off1 | off2, p1 + p2)
                            tables[name][r, c] = total
                        # a_{k'l'}θ_{l'} = θ_{k'}θ_{l'}/L, the δ term vanishes against θ_{l'}
                        tables["c"][r, c] = law.moment(frozenset({kp, lp, k, l}), frozenset(), 2)
        return MomentTables(**tables)

    @staticmethod
    def _fedsgd_tables(spec: NetworkSpec) -> MomentTables:
        K = spec.K
        const = np.full((K * K, K * K), 1.0 / K**2)
        return MomentTables(t00=const, t10=const, t01=const, t11=const, c=const)

    @staticmethod
    def build_combine_moments(
        spec: NetworkSpec,
        sched: Schedule,
        exact: bool = False,
        cap: Optional[int] = None,
        mc_draws: Optional[int] = None,
        seed: int = 0,
        logger: Optional[Logger] = None,
    ) -> Tuple[MomentTables, bool]:
        """
        Tables of the combination step.

        Args:
            spec: validated network
            sched: schedule
            exact: refuse the Monte-Carlo fallback
            cap: per-agent event cap (defaults to Config.ENUMERATION_CAP)
            mc_draws: draws for the fallback (defaults to Config.MC_DRAWS)
            seed: master seed for the fallback stream
            logger: optional logger

        Returns:
            Tuple of (tables, exact flag)

        Raises:
            EnumerationCapExceeded: enumeration too large and ``exact`` is set
        """
        cap = Config.ENUMERATION_CAP if cap is None else cap
        K = spec.K

        if spec.mode == Mode.FEDSGD:
            return MomentBuilder._fedsgd_tables(spec), True

        if spec.mode == Mode.FEDAVG:
            if K**4 <= cap:
                return MomentBuilder._fedavg_tables(spec), True
            exceeded = EnumerationCapExceeded(-1, K**4, cap)
        else:
            exceeded = None
            for m in range(K):
                events = MomentBuilder.event_count(spec, m)
                if events > cap:
                    exceeded = EnumerationCapExceeded(m, events, cap)
                    break
            if exceeded is None:
                return MomentBuilder._decentralized_tables(spec, cap), True

        if exact:
            raise exceeded
        if logger:
            logger.warning("⚠️ %s; using Monte-Carlo moments", exceeded)

        from theory.oracle import MomentOracle

        draws = Config.MC_DRAWS if mc_draws is None else mc_draws
        return MomentOracle.combine_tables(spec, draws, seed), False

    @staticmethod
    def build_moments(
        spec: NetworkSpec,
        sched: Schedule,
        hessians: np.ndarray,
        R_blocks: np.ndarray,
        exact: bool = False,
        cap: Optional[int] = None,
        mc_draws: Optional[int] = None,
        seed: int = 0,
        logger: Optional[Logger] = None,
    ) -> MomentMatrices:
        """Local and combine tables bundled with the Hessians and noise blocks."""
        combine, is_exact = MomentBuilder.build_combine_moments(
            spec, sched, exact=exact, cap=cap, mc_draws=mc_draws, seed=seed, logger=logger
        )
        if logger:
            logger.info(
                "🧮 Built moment tables (K=%d, M=%d, mode=%s, exact=%s)",
                spec.K,
                hessians.shape[1],
                spec.mode.value,
                is_exact,
            )
        return MomentMatrices(
            K=spec.K,
            M=hessians.shape[1],
            mu=sched.mu,
            mode=spec.mode,
            hessians=hessians,
            R_blocks=R_blocks,
            local=MomentBuilder.build_local_moments(spec),
            combine=combine,
            exact=is_exact,
        )
