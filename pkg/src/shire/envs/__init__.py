"""Native, seedable implementations of the four benchmark environments.

Each environment owns its RNG (used only for initial-state draws; all
transition dynamics are deterministic), tracks its own episode-step counter,
and raises UsageError if stepped after termination/truncation.  Termination
and truncation are reported separately; they are mutually exclusive, with
termination taking precedence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class EnvSpec:
    name: str
    obs_dim: int          # network input width (one-hot width for discrete obs)
    raw_obs_dim: int      # width of the observation vector emitted by step()
    n_actions: int
    max_episode_steps: int
    action_names: tuple
    ssr: float | None     # solved-state reward; None => best-baseline protocol
    discrete_obs: bool = False


@dataclass
class StepResult:
    obs: np.ndarray
    reward: float
    terminated: bool
    truncated: bool


from .cartpole import CartPole          # noqa: E402
from .mountaincar import MountainCar    # noqa: E402
from .lander import Lander              # noqa: E402
from .taxi import Taxi, taxi_encode, taxi_decode  # noqa: E402

ENVS = {
    "cartpole": CartPole,
    "mountaincar": MountainCar,
    "lander": Lander,
    "taxi": Taxi,
}


def make(name: str, seed=None):
    try:
        cls = ENVS[name]
    except KeyError:
        raise ConfigError(
            f"unknown environment '{name}'; valid names: {', '.join(sorted(ENVS))}"
        ) from None
    env = cls()
    env.reset(seed=seed)
    return env


def get_spec(name: str) -> EnvSpec:
    try:
        return ENVS[name].spec
    except KeyError:
        raise ConfigError(
            f"unknown environment '{name}'; valid names: {', '.join(sorted(ENVS))}"
        ) from None


def featurize(spec: EnvSpec, obs_batch: np.ndarray) -> np.ndarray:
    """Map raw observations (n, raw_obs_dim) to network inputs (n, obs_dim)."""
    obs_batch = np.atleast_2d(np.asarray(obs_batch, dtype=np.float64))
    if not spec.discrete_obs:
        return obs_batch
    codes = obs_batch[:, 0].astype(np.intp)
    out = np.zeros((codes.shape[0], spec.obs_dim))
    out[np.arange(codes.shape[0]), codes] = 1.0
    return out
