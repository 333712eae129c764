"""PPO with intuition-net shaping, native benchmark environments, and a
sample-efficiency comparison harness."""

__version__ = "0.1.0"

from . import bench, checkpoint, envs, intuition, nn, ppo, reports  # noqa: F401
from .ppo import PPOConfig, train  # noqa: F401
