"""Mountain-car with the canonical published dynamics.

State (position, velocity).  Per step:

    v' = clip(v + (action - 1) * 0.001 - 0.0025 * cos(3 p), -0.07, 0.07)
    p' = clip(p + v', -1.2, 0.6);  v' = 0 if p' hits -1.2 while moving left

Reward is -1 every step; terminates when p' >= 0.5, truncates at 200 steps.
"""

from __future__ import annotations

import numpy as np

from . import EnvSpec, StepResult
from ..errors import UsageError

FORCE = 0.001
GRAVITY = 0.0025
MIN_POS = -1.2
MAX_POS = 0.6
MAX_SPEED = 0.07
GOAL_POS = 0.5


class MountainCar:
    spec = EnvSpec(
        name="mountaincar",
        obs_dim=2,
        raw_obs_dim=2,
        n_actions=3,
        max_episode_steps=200,
        action_names=("push_left", "no_push", "push_right"),
        ssr=-110.0,
    )

    def __init__(self):
        self._rng = np.random.default_rng()
        self.state = None
        self._steps = 0
        self._done = True

    def reset(self, seed=None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self.state = np.array([self._rng.uniform(-0.6, -0.4), 0.0])
        self._steps = 0
        self._done = False
        return self.state.copy()

    def step(self, action: int) -> StepResult:
        if self._done:
            raise UsageError("mountaincar: step() on a finished episode")
        pos, vel = self.state
        vel = vel + (action - 1) * FORCE - GRAVITY * np.cos(3.0 * pos)
        vel = float(np.clip(vel, -MAX_SPEED, MAX_SPEED))
        pos = float(np.clip(pos + vel, MIN_POS, MAX_POS))
        if pos == MIN_POS and vel < 0.0:
            vel = 0.0
        self.state = np.array([pos, vel])

        self._steps += 1
        terminated = bool(pos >= GOAL_POS)
        truncated = not terminated and self._steps >= self.spec.max_episode_steps
        self._done = terminated or truncated
        return StepResult(self.state.copy(), -1.0, terminated, truncated)
