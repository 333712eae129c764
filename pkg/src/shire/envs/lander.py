"""Simplified planar lunar lander (rigid body, no contact solver).

The craft starts at (0, 10) with a random horizontal drift and must touch
down on the pad x in [-0.5, 0.5] at y = 0.  The main engine accelerates
along the body-up axis (-sin theta, cos theta) * A_MAIN, the side engines
apply angular acceleration +/- ALPHA_SIDE (fire_left spins counter-
clockwise), gravity is (0, -G); semi-implicit Euler at dt = 0.02.

Observation: (x, y, vx, vy, theta, omega, left_contact, right_contact).

Reward is potential-based shaping

    phi = -100*sqrt(x^2+y^2) - 100*sqrt(vx^2+vy^2) - 100*|theta|

per-step reward = phi' - phi - 0.3*[main fired] - 0.03*[side fired], plus
+100 on a soft pad landing (|x|<=0.5, |vx|<=0.5, |vy|<=0.5, |theta|<=0.2 at
ground contact) or -100 on a crash or when leaving the flight envelope
(|x| > 10 or y > 20).  Truncates after 1000 steps.
"""

from __future__ import annotations

import numpy as np

from . import EnvSpec, StepResult
from ..errors import UsageError

G = 1.625
A_MAIN = 3.0
ALPHA_SIDE = 0.15
DT = 0.02
X_BOUND = 10.0
Y_BOUND = 20.0
PAD_HALF_WIDTH = 0.5
SOFT_V = 0.5
SOFT_THETA = 0.2
MAIN_COST = 0.3
SIDE_COST = 0.03

NOOP, FIRE_LEFT, FIRE_MAIN, FIRE_RIGHT = 0, 1, 2, 3


def shaping(x, y, vx, vy, theta) -> float:
    return float(
        -100.0 * np.sqrt(x * x + y * y)
        - 100.0 * np.sqrt(vx * vx + vy * vy)
        - 100.0 * abs(theta)
    )


class Lander:
    spec = EnvSpec(
        name="lander",
        obs_dim=8,
        raw_obs_dim=8,
        n_actions=4,
        max_episode_steps=1000,
        action_names=("noop", "fire_left", "fire_main", "fire_right"),
        ssr=None,
    )

    def __init__(self):
        self._rng = np.random.default_rng()
        self.state = None  # (x, y, vx, vy, theta, omega)
        self._phi = 0.0
        self._steps = 0
        self._done = True

    def _obs(self, contact: bool) -> np.ndarray:
        x, y, vx, vy, theta, omega = self.state
        c = 1.0 if contact else 0.0
        return np.array([x, y, vx, vy, theta, omega, c, c])

    def reset(self, seed=None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        vx = self._rng.uniform(-1.0, 1.0)
        self.state = np.array([0.0, 10.0, vx, 0.0, 0.0, 0.0])
        self._phi = shaping(0.0, 10.0, vx, 0.0, 0.0)
        self._steps = 0
        self._done = False
        return self._obs(False)

    def step(self, action: int) -> StepResult:
        if self._done:
            raise UsageError("lander: step() on a finished episode")
        x, y, vx, vy, theta, omega = self.state
        main = action == FIRE_MAIN
        side = action in (FIRE_LEFT, FIRE_RIGHT)

        ax = -A_MAIN * np.sin(theta) if main else 0.0
        ay = (A_MAIN * np.cos(theta) if main else 0.0) - G
        alpha = ALPHA_SIDE if action == FIRE_LEFT else (-ALPHA_SIDE if action == FIRE_RIGHT else 0.0)

        vx = vx + ax * DT
        vy = vy + ay * DT
        x = x + vx * DT
        y = y + vy * DT
        omega = omega + alpha * DT
        theta = theta + omega * DT
        self.state = np.array([x, y, vx, vy, theta, omega])

        phi = shaping(x, y, vx, vy, theta)
        reward = phi - self._phi
        self._phi = phi
        if main:
            reward -= MAIN_COST
        if side:
            reward -= SIDE_COST

        self._steps += 1
        contact = y <= 0.0
        terminated = False
        if contact:
            terminated = True
            soft = (
                abs(x) <= PAD_HALF_WIDTH
                and abs(vx) <= SOFT_V
                and abs(vy) <= SOFT_V
                and abs(theta) <= SOFT_THETA
            )
            reward += 100.0 if soft else -100.0
        elif abs(x) > X_BOUND or y > Y_BOUND:
            terminated = True
            reward -= 100.0
        truncated = not terminated and self._steps >= self.spec.max_episode_steps
        self._done = terminated or truncated
        return StepResult(self._obs(contact), float(reward), terminated, truncated)
