"""Cart-pole balancing with the canonical published dynamics.

State (x, x_dot, theta, theta_dot); Euler integration at dt=0.02 with
gravity 9.8, cart mass 1.0, pole mass 0.1, pole half-length 0.5 and
force 10.0.  Reward is +1 every step; the episode terminates when
|x| > 2.4 or |theta| > 0.2095 rad and truncates after 500 steps.
"""

from __future__ import annotations

import numpy as np

from . import EnvSpec, StepResult
from ..errors import UsageError

GRAVITY = 9.8
MASS_CART = 1.0
MASS_POLE = 0.1
TOTAL_MASS = MASS_CART + MASS_POLE
HALF_LENGTH = 0.5
POLE_MASS_LENGTH = MASS_POLE * HALF_LENGTH
FORCE_MAG = 10.0
DT = 0.02
X_LIMIT = 2.4
THETA_LIMIT = 0.2095


class CartPole:
    spec = EnvSpec(
        name="cartpole",
        obs_dim=4,
        raw_obs_dim=4,
        n_actions=2,
        max_episode_steps=500,
        action_names=("left", "right"),
        ssr=500.0,
    )

    def __init__(self):
        self._rng = np.random.default_rng()
        self.state = None
        self._steps = 0
        self._done = True

    def reset(self, seed=None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self.state = self._rng.uniform(-0.05, 0.05, size=4)
        self._steps = 0
        self._done = False
        return self.state.copy()

    def step(self, action: int) -> StepResult:
        if self._done:
            raise UsageError("cartpole: step() on a finished episode")
        x, x_dot, theta, theta_dot = self.state
        force = FORCE_MAG if action == 1 else -FORCE_MAG

        cos_t = np.cos(theta)
        sin_t = np.sin(theta)
        temp = (force + POLE_MASS_LENGTH * theta_dot**2 * sin_t) / TOTAL_MASS
        theta_acc = (GRAVITY * sin_t - cos_t * temp) / (
            HALF_LENGTH * (4.0 / 3.0 - MASS_POLE * cos_t**2 / TOTAL_MASS)
        )
        x_acc = temp - POLE_MASS_LENGTH * theta_acc * cos_t / TOTAL_MASS

        x = x + DT * x_dot
        x_dot = x_dot + DT * x_acc
        theta = theta + DT * theta_dot
        theta_dot = theta_dot + DT * theta_acc
        self.state = np.array([x, x_dot, theta, theta_dot])

        self._steps += 1
        terminated = bool(abs(x) > X_LIMIT or abs(theta) > THETA_LIMIT)
        truncated = not terminated and self._steps >= self.spec.max_episode_steps
        self._done = terminated or truncated
        return StepResult(self.state.copy(), 1.0, terminated, truncated)
