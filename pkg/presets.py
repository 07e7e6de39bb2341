"""
Named experiment presets.

case1   decentralized, q_k = 0.5, random q_lk, T = 100
case2   case1 without local updates (T = 1)
case3   full participation and sampling (q_k = q_lk = 1) on a complete graph,
        T = 100; every combine averages all agents
fedsgd  federated averaging with every agent participating
fedavg  federated averaging with dropouts (q_k = 0.5)

All use K = 20 agents, M = 5 features and μ = 1e-4; N = 10⁴ samples per
agent unless ``full_scale`` asks for 10⁶. The desk variant shrinks any
preset to K = 5, M = 3, N = 2000, μ = 0.01, 1500 iterations and 10 runs,
with T = 10 wherever the preset uses local updates. Desk networks are
complete graphs with link sampling probabilities drawn from [0.5, 1], so the
three cases keep comparable plateaus at small step sizes.
"""

from typing import Any, Dict

from config import Config
from helpers.errors import UnknownPreset
from models.experiment import ExperimentConfig

PRESET_NAMES = ("case1", "case2", "case3", "fedsgd", "fedavg")

DESK_N = 2000
DESK_Q_RANGE = (0.5, 1.0)
FULL_N = 10**6
DEFAULT_N = 10**4


def _base(name: str, K: int, M: int, N: int) -> Dict[str, Any]:
    return {
        "name": name,
        "network": {"K": K, "graph": "erdos_renyi", "edge_prob": 0.4, "weights": "metropolis"},
        "problem": {"M": M, "N": N, "ru": 1.0, "rw": 1.0, "sigma_v": 0.1, "batch": 1},
        "schedule": {"T": 100, "iters": 1000, "mu": 1e-4},
        "run": {"runs": 5, "seed": 0, "tail": 0.1},
        "output": {"stem": name},
    }


def preset(name: str, desk: bool = False, full_scale: bool = False) -> ExperimentConfig:
    """
    Build the configuration of a named preset.

    Args:
        name: one of case1, case2, case3, fedsgd, fedavg
        desk: shrink to the fast desk-scale variant
        full_scale: N = 10⁶ samples per agent (ignored for desk)

    Returns:
        ExperimentConfig

    Raises:
        UnknownPreset: unrecognised name
    """
    if name not in PRESET_NAMES:
        raise UnknownPreset(f"Unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")

    N = FULL_N if full_scale else DEFAULT_N
    payload = _base(name, K=20, M=5, N=N)
    net, sched = payload["network"], payload["schedule"]

    if name == "case1":
        net.update({"mode": "decentralized", "q": 0.5, "Q": None})
    elif name == "case2":
        net.update({"mode": "decentralized", "q": 0.5, "Q": None})
        sched.update({"T": 1, "iters": 60_000})
    elif name == "case3":
        net.update({"mode": "decentralized", "graph": "complete", "q": 1.0, "Q": 1.0})
    elif name == "fedsgd":
        net.update({"mode": "fedsgd", "q": 1.0})
    else:
        net.update({"mode": "fedavg", "q": 0.5})

    if desk:
        net.update({"K": 5, "graph": "complete", "q_range": DESK_Q_RANGE})
        payload["problem"].update({"M": 3, "N": DESK_N})
        sched.update({"T": 10 if sched["T"] > 1 else 1, "iters": 1500, "mu": 0.01})
        payload["run"]["runs"] = 10
        payload["output"]["stem"] = f"{name}_desk"

    payload["output"]["directory"] = Config.OUTPUT_DIR
    return Config.parse_experiment(payload)
