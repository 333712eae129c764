"""5x5 taxi grid-world with the canonical map, depots and reward rules.

Depots: R(0,0), G(0,4), Y(4,0), B(4,3).  The observation is the single
integer code ((row*5 + col)*5 + passenger_loc)*4 + destination, emitted as
a one-element vector; passenger_loc 4 means "in taxi".  Movement into a
wall or border leaves the position unchanged (the -1 step reward still
applies).  Rewards: -1 per step, -10 for an illegal pickup/dropoff, +20
for dropping the passenger at the destination (terminates).  Dropoff at a
non-destination depot legally places the passenger there.  Truncates at
200 steps.
"""

from __future__ import annotations

import numpy as np

from . import EnvSpec, StepResult
from ..errors import UsageError

DEPOTS = ((0, 0), (0, 4), (4, 0), (4, 3))  # R, G, Y, B
DEPOT_NAMES = ("R", "G", "Y", "B")
IN_TAXI = 4

# Cells whose east side is walled off (movement east from (r, c) blocked).
EAST_BLOCKED = {(0, 1), (1, 1), (3, 0), (3, 2), (4, 0), (4, 2)}

SOUTH, NORTH, EAST, WEST, PICKUP, DROPOFF = range(6)


def taxi_encode(row: int, col: int, passenger_loc: int, destination: int) -> int:
    if not (0 <= row <= 4 and 0 <= col <= 4):
        raise UsageError(f"taxi_encode: position ({row},{col}) out of range")
    if not (0 <= passenger_loc <= 4 and 0 <= destination <= 3):
        raise UsageError(
            f"taxi_encode: passenger_loc={passenger_loc}, destination={destination} out of range"
        )
    return ((row * 5 + col) * 5 + passenger_loc) * 4 + destination


def taxi_decode(code: int):
    if not 0 <= code < 500:
        raise UsageError(f"taxi_decode: code {code} out of range")
    code, destination = divmod(code, 4)
    code, passenger_loc = divmod(code, 5)
    row, col = divmod(code, 5)
    return row, col, passenger_loc, destination


class Taxi:
    spec = EnvSpec(
        name="taxi",
        obs_dim=500,
        raw_obs_dim=1,
        n_actions=6,
        max_episode_steps=200,
        action_names=("south", "north", "east", "west", "pickup", "dropoff"),
        ssr=None,
        discrete_obs=True,
    )

    def __init__(self):
        self._rng = np.random.default_rng()
        self.row = self.col = self.pass_loc = self.dest = 0
        self._steps = 0
        self._done = True

    def _obs(self) -> np.ndarray:
        return np.array([float(taxi_encode(self.row, self.col, self.pass_loc, self.dest))])

    def reset(self, seed=None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self.row = int(self._rng.integers(5))
        self.col = int(self._rng.integers(5))
        self.pass_loc = int(self._rng.integers(4))
        dest = int(self._rng.integers(3))
        self.dest = dest + 1 if dest >= self.pass_loc else dest
        self._steps = 0
        self._done = False
        return self._obs()

    def step(self, action: int) -> StepResult:
        if self._done:
            raise UsageError("taxi: step() on a finished episode")
        reward = -1.0
        terminated = False
        pos = (self.row, self.col)

        if action == SOUTH:
            self.row = min(self.row + 1, 4)
        elif action == NORTH:
            self.row = max(self.row - 1, 0)
        elif action == EAST:
            if self.col < 4 and pos not in EAST_BLOCKED:
                self.col += 1
        elif action == WEST:
            if self.col > 0 and (self.row, self.col - 1) not in EAST_BLOCKED:
                self.col -= 1
        elif action == PICKUP:
            if self.pass_loc < IN_TAXI and pos == DEPOTS[self.pass_loc]:
                self.pass_loc = IN_TAXI
            else:
                reward = -10.0
        elif action == DROPOFF:
            if self.pass_loc == IN_TAXI and pos == DEPOTS[self.dest]:
                self.pass_loc = self.dest
                reward = 20.0
                terminated = True
            elif self.pass_loc == IN_TAXI and pos in DEPOTS:
                self.pass_loc = DEPOTS.index(pos)
            else:
                reward = -10.0
        else:
            raise UsageError(f"taxi: invalid action {action}")

        self._steps += 1
        truncated = not terminated and self._steps >= self.spec.max_episode_steps
        self._done = terminated or truncated
        return StepResult(self._obs(), reward, terminated, truncated)
