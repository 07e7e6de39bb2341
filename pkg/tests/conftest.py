import logging
import os
from itertools import product
from typing import Callable, Dict, List, Tuple

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from config import Config
from models.experiment import ExperimentConfig
from models.network import Mode, NetworkSpec
from models.schedule import Schedule

settings.register_profile(
    "ci", max_examples=40, deadline=None, suppress_health_check=(HealthCheck.too_slow,)
)
settings.register_profile("dev", max_examples=15, deadline=None)
settings.load_profile("ci" if "CI" in os.environ else "dev")

Event = Tuple[float, np.ndarray, np.ndarray]


@pytest.fixture
def logger() -> logging.Logger:
    return logging.getLogger("diffusion.tests")


@pytest.fixture
def two_agent_spec() -> NetworkSpec:
    """A = [[0.6, 0.5], [0.4, 0.5]], q = (0.5, 1), agent 1 samples agent 2 w.p. 0.8."""
    return NetworkSpec(
        K=2,
        neighborhoods=[[0, 1], [0, 1]],
        A=[[0.6, 0.5], [0.4, 0.5]],
        q=[0.5, 1.0],
        Q=[[1.0, 1.0], [0.8, 1.0]],
        mode=Mode.DECENTRALIZED,
    )


@pytest.fixture
def ring_spec() -> NetworkSpec:
    """Three agents, every pair connected, heterogeneous probabilities."""
    A = np.array([[0.5, 0.25, 0.2], [0.3, 0.5, 0.3], [0.2, 0.25, 0.5]])
    Q = np.array([[1.0, 0.6, 0.9], [0.7, 1.0, 0.4], [0.5, 0.8, 1.0]])
    return NetworkSpec(
        K=3,
        neighborhoods=[[0, 1, 2]] * 3,
        A=A,
        q=[0.4, 0.7, 0.9],
        Q=Q,
        mode=Mode.DECENTRALIZED,
    )


def federated_spec(K: int, q, mode: Mode) -> NetworkSpec:
    return NetworkSpec(
        K=K,
        neighborhoods=[list(range(K))] * K,
        A=np.full((K, K), 1.0 / K),
        q=np.broadcast_to(np.asarray(q, dtype=float), (K,)),
        Q=np.ones((K, K)),
        mode=mode,
    )


@pytest.fixture
def make_federated() -> Callable[..., NetworkSpec]:
    return federated_spec


def _decentralized_events(spec: NetworkSpec) -> List[Event]:
    K = spec.K
    per_agent = []
    for k in range(K):
        others = spec.others(k)
        options = [(1.0 - spec.q[k], False, ())]
        for bits in product((False, True), repeat=len(others)):
            prob = spec.q[k]
            for l, on in zip(others, bits):
                prob *= spec.Q[l, k] if on else 1.0 - spec.Q[l, k]
            options.append((prob, True, tuple(l for l, on in zip(others, bits) if on)))
        per_agent.append(options)

    events = []
    for combo in product(*per_agent):
        prob = float(np.prod([c[0] for c in combo]))
        if prob == 0.0:
            continue
        theta = np.array([c[1] for c in combo])
        A = np.eye(K)
        for k, (_, on, kept) in enumerate(combo):
            if on and kept:
                A[:, k] = 0.0
                A[list(kept), k] = spec.A[list(kept), k]
                A[k, k] = 1.0 - A[:, k].sum()
        events.append((prob, theta, A))
    return events


def _fedavg_events(spec: NetworkSpec) -> List[Event]:
    K = spec.K
    events = []
    for bits in product((False, True), repeat=K):
        theta = np.array(bits)
        prob = float(np.prod(np.where(theta, spec.q, 1.0 - spec.q)))
        if prob == 0.0:
            continue
        L = theta.sum()
        if L == 0:
            A = np.eye(K)
        else:
            active = theta.astype(float)
            A = np.outer(active, active) / L + np.diag(1.0 - active)
        events.append((prob, theta, A))
    return events


def enumerate_events(spec: NetworkSpec) -> List[Event]:
    """Every realization (probability, θ, A_combine) of a small network."""
    if spec.mode == Mode.FEDSGD:
        return [(1.0, np.ones(spec.K, dtype=bool), np.full((spec.K, spec.K), 1.0 / spec.K))]
    if spec.mode == Mode.FEDAVG:
        return _fedavg_events(spec)
    return _decentralized_events(spec)


def brute_tables(events: List[Event], K: int) -> Dict[str, np.ndarray]:
    """Moment tables straight from their definitions, summed over ``events``."""
    out = {name: np.zeros((K * K, K * K)) for name in ("t00", "t10", "t01", "t11", "c")}
    for prob, theta, A in events:
        weights = theta.astype(float)
        At = A.T
        factors = {
            "t00": (At, At),
            "t10": (At * weights[None, :], At),
            "t01": (At, At * weights[None, :]),
            "t11": (At * weights[None, :], At * weights[None, :]),
            "c": (A * weights[None, :], A * weights[None, :]),
        }
        for name, (left, right) in factors.items():
            out[name] += prob * np.einsum("xy,zw->xzyw", left, right).reshape(K * K, K * K)
    return out


@pytest.fixture
def events_of() -> Callable[[NetworkSpec], List[Event]]:
    return enumerate_events


@pytest.fixture
def tables_of() -> Callable[[List[Event], int], Dict[str, np.ndarray]]:
    return brute_tables


@pytest.fixture
def spd_hessians() -> Callable[[int, int, int], np.ndarray]:
    def build(K: int, M: int, seed: int = 0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((K, M, M))
        return 2.0 * (np.einsum("kij,klj->kil", X, X) / M + np.eye(M))

    return build


@pytest.fixture
def small_payload() -> Callable[..., dict]:
    """Raw experiment mapping for a fast three-agent run."""

    def build(**sections) -> dict:
        payload = {
            "name": "small",
            "network": {"K": 3, "graph": "complete", "weights": "metropolis", "q": 0.5, "Q": 0.8},
            "problem": {"M": 2, "N": 200, "ru": 1.0, "rw": 1.0, "sigma_v": 0.1, "batch": 1},
            "schedule": {"T": 2, "iters": 300, "mu": 0.01},
            "run": {"runs": 2, "seed": 7, "tail": 0.2, "noise_points": 4},
            "output": {"stem": "small"},
        }
        for name, update in sections.items():
            payload[name].update(update)
        return payload

    return build


@pytest.fixture
def small_config(small_payload, tmp_path) -> ExperimentConfig:
    return Config.parse_experiment(small_payload(output={"directory": str(tmp_path)}))


@pytest.fixture
def unit_schedule() -> Schedule:
    return Schedule(T=1, iters=10, mu=0.1)
