"""Abstract-state encoders: raw observations -> parent-node state labels.

Each environment has a fixed catalog of parent nodes it can supply; a net
may condition on any subset.  Batch encoders are vectorized and return
state indices into the catalog's label tuples; the per-observation
functions below are thin wrappers used by tests and net inspection.
"""

from __future__ import annotations

import numpy as np

from ..envs import taxi as taxi_env
from ..errors import ConfigError, UsageError

REST_EPS = 1e-12

QUADRANTS = ("q1", "q2", "q3", "q4")


def wrap_angle(t):
    """Wrap to (-pi, pi]."""
    w = np.mod(np.asarray(t, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


def quadrant_index(t):
    """q1: [0, pi/2), q2: [pi/2, pi], q3: (-pi, -pi/2), q4: [-pi/2, 0)."""
    w = wrap_angle(t)
    return np.select(
        [w >= np.pi / 2, w >= 0.0, w >= -np.pi / 2],
        [1, 0, 3],
        default=2,
    )


# --- per-environment batch encoders (obs matrix -> state-index vector) ----

def _cartpole_lean(obs):
    return (obs[:, 2] > 0.0).astype(np.intp)          # 0 left, 1 right


def _mountaincar_vel_dir(obs):
    v = obs[:, 1]
    rest = np.abs(v) <= REST_EPS
    return np.select([rest, v > 0.0], [1, 2], default=0)  # negative, rest, positive


def _lander_accel(obs):
    x, y, vx, vy = obs[:, 0], obs[:, 1], obs[:, 2], obs[:, 3]
    speed = np.hypot(vx, vy)
    theta_d = np.arctan2(-y, -x)
    eps = wrap_angle(theta_d - np.arctan2(vy, vx))
    # 0 positive (rotate velocity ccw), 1 negative, 2 stationary
    return np.select([speed <= REST_EPS, eps > 0.0], [2, 0], default=1)


def _lander_tilt(obs):
    return quadrant_index(obs[:, 4])


def _lander_vel_quad(obs):
    return quadrant_index(np.arctan2(obs[:, 3], obs[:, 2]))


def _taxi_fields(obs):
    codes = obs[:, 0].astype(np.int64)
    if codes.min(initial=0) < 0 or codes.max(initial=0) >= 500:
        raise UsageError("taxi observation code out of range")
    rest, dest = np.divmod(codes, 4)
    rest, pas = np.divmod(rest, 5)
    row, col = np.divmod(rest, 5)
    depots = np.array(taxi_env.DEPOTS)
    target_idx = np.where(pas < taxi_env.IN_TAXI, pas, dest)
    trow = depots[target_idx, 0]
    tcol = depots[target_idx, 1]
    return row, col, pas, trow, tcol


def _taxi_row_rel(obs):
    row, _, _, trow, _ = _taxi_fields(obs)
    return np.select([row < trow, row == trow], [0, 1], default=2)  # above, same, below


def _taxi_col_rel(obs):
    _, col, _, _, tcol = _taxi_fields(obs)
    return np.select([col < tcol, col == tcol], [0, 1], default=2)  # left, same, right


def _taxi_phase(obs):
    _, _, pas, _, _ = _taxi_fields(obs)
    return (pas == taxi_env.IN_TAXI).astype(np.intp)  # fetch, deliver


class BatchEncoder:
    """Catalog of parent nodes an environment can supply."""

    def __init__(self, env_name: str, catalog: dict):
        self.env_name = env_name
        self.catalog = catalog  # node name -> (state labels, batch fn)

    def node_states(self, node: str) -> tuple:
        if node not in self.catalog:
            raise ConfigError(
                f"environment '{self.env_name}' has no abstract state '{node}' "
                f"(available: {', '.join(self.catalog)})"
            )
        return self.catalog[node][0]

    def encode_batch(self, nodes, obs_batch: np.ndarray) -> dict:
        """State-index vector per requested node for a raw obs matrix."""
        obs_batch = np.atleast_2d(np.asarray(obs_batch, dtype=np.float64))
        return {n: self.catalog[n][1](obs_batch) for n in nodes}

    def encode_one(self, obs) -> dict:
        """Full assignment {node -> state label} for one raw observation."""
        obs = np.atleast_2d(np.asarray(obs, dtype=np.float64))
        out = {}
        for name, (labels, fn) in self.catalog.items():
            out[name] = labels[int(fn(obs)[0])]
        return out


ENCODERS = {
    "cartpole": BatchEncoder("cartpole", {
        "lean": (("left", "right"), _cartpole_lean),
    }),
    "mountaincar": BatchEncoder("mountaincar", {
        "vel_dir": (("negative", "rest", "positive"), _mountaincar_vel_dir),
    }),
    "lander": BatchEncoder("lander", {
        "accel": (("positive", "negative", "stationary"), _lander_accel),
        "tilt": (QUADRANTS, _lander_tilt),
        "vel_quad": (QUADRANTS, _lander_vel_quad),
    }),
    "taxi": BatchEncoder("taxi", {
        "row_rel": (("above", "same", "below"), _taxi_row_rel),
        "col_rel": (("left", "same", "right"), _taxi_col_rel),
        "phase": (("fetch", "deliver"), _taxi_phase),
    }),
}


def get_encoder(env_name: str) -> BatchEncoder:
    try:
        return ENCODERS[env_name]
    except KeyError:
        raise ConfigError(f"no abstract-state encoder for environment '{env_name}'") from None


def encode_cartpole(obs) -> dict:
    """lean = right iff the pole angle is strictly positive."""
    return get_encoder("cartpole").encode_one(obs)


def encode_mountaincar(obs) -> dict:
    """vel_dir from the velocity sign, with a dedicated rest state at |v| <= 1e-12."""
    return get_encoder("mountaincar").encode_one(obs)


def encode_lander(obs, variant: str = "basic") -> dict:
    """accel (which way the velocity vector must rotate to point at the pad)
    and tilt (orientation quadrant); the antiparallel variant adds vel_quad
    (velocity-direction quadrant)."""
    if variant not in ("basic", "antiparallel"):
        raise ConfigError(f"unknown lander encoder variant '{variant}'")
    full = get_encoder("lander").encode_one(obs)
    if variant == "basic":
        del full["vel_quad"]
    return full


def encode_taxi(obs) -> dict:
    """Taxi position relative to the current target depot, plus trip phase."""
    if np.isscalar(obs) or isinstance(obs, (int, np.integer)):
        obs = np.array([float(obs)])
    return get_encoder("taxi").encode_one(obs)
