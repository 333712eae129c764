"""Dense actor-critic network with hand-written backprop and Adam.

Two separate trunks (actor and critic), each obs_dim -> 64 -> 64 with tanh
activations, followed by a linear head: one logit per action for the actor,
a scalar value for the critic. Everything is float64 and pure-functional:
parameters, gradients and optimizer state are plain dicts of arrays, and
every operation returns new state instead of mutating.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError

HIDDEN = 64

# Parameter dict keys in canonical (checkpoint) order.  a_* is the actor
# trunk/head, c_* the critic.
PARAM_KEYS = (
    "a_w1", "a_b1", "a_w2", "a_b2", "a_w3", "a_b3",
    "c_w1", "c_b1", "c_w2", "c_b2", "c_w3", "c_b3",
)


@dataclass
class ActorCriticParams:
    obs_dim: int
    n_actions: int
    tensors: dict  # key -> float64 ndarray, keys == PARAM_KEYS

    def copy(self) -> "ActorCriticParams":
        return ActorCriticParams(
            self.obs_dim, self.n_actions,
            {k: v.copy() for k, v in self.tensors.items()},
        )


@dataclass
class AdamState:
    m: dict
    v: dict
    t: int = 0


def _orthogonal(rng: np.random.Generator, rows: int, cols: int, gain: float) -> np.ndarray:
    a = rng.normal(size=(max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return gain * q[:rows, :cols]


def init_params(obs_dim: int, n_actions: int, rng: np.random.Generator) -> ActorCriticParams:
    """Orthogonal init: gain sqrt(2) for hidden layers, 0.01 actor head, 1.0 critic head."""
    if obs_dim < 1 or n_actions < 2:
        raise ConfigError(f"bad network dims: obs_dim={obs_dim}, n_actions={n_actions}")
    g = np.sqrt(2.0)
    t = {
        "a_w1": _orthogonal(rng, obs_dim, HIDDEN, g),
        "a_b1": np.zeros(HIDDEN),
        "a_w2": _orthogonal(rng, HIDDEN, HIDDEN, g),
        "a_b2": np.zeros(HIDDEN),
        "a_w3": _orthogonal(rng, HIDDEN, n_actions, 0.01),
        "a_b3": np.zeros(n_actions),
        "c_w1": _orthogonal(rng, obs_dim, HIDDEN, g),
        "c_b1": np.zeros(HIDDEN),
        "c_w2": _orthogonal(rng, HIDDEN, HIDDEN, g),
        "c_b2": np.zeros(HIDDEN),
        "c_w3": _orthogonal(rng, HIDDEN, 1, 1.0),
        "c_b3": np.zeros(1),
    }
    return ActorCriticParams(obs_dim, n_actions, t)


def zeros_like_params(params: ActorCriticParams) -> dict:
    return {k: np.zeros_like(v) for k, v in params.tensors.items()}


def forward(params: ActorCriticParams, obs: np.ndarray):
    """Batch forward pass: (n, obs_dim) -> logits (n, n_actions), values (n,)."""
    logits, values, _ = forward_cached(params, obs)
    return logits, values


def policy_logits(params: ActorCriticParams, obs: np.ndarray) -> np.ndarray:
    """Actor-only forward pass (skips the critic trunk)."""
    obs = np.asarray(obs, dtype=np.float64)
    if obs.ndim != 2 or obs.shape[1] != params.obs_dim:
        raise ConfigError(
            f"obs batch shape {obs.shape} incompatible with obs_dim={params.obs_dim}"
        )
    t = params.tensors
    h = np.tanh(obs @ t["a_w1"] + t["a_b1"])
    h = np.tanh(h @ t["a_w2"] + t["a_b2"])
    return h @ t["a_w3"] + t["a_b3"]


def forward_cached(params: ActorCriticParams, obs: np.ndarray):
    """Forward pass that also returns the activation cache needed by backward()."""
    obs = np.asarray(obs, dtype=np.float64)
    if obs.ndim != 2 or obs.shape[1] != params.obs_dim:
        raise ConfigError(
            f"obs batch shape {obs.shape} incompatible with obs_dim={params.obs_dim}"
        )
    t = params.tensors
    ah1 = np.tanh(obs @ t["a_w1"] + t["a_b1"])
    ah2 = np.tanh(ah1 @ t["a_w2"] + t["a_b2"])
    logits = ah2 @ t["a_w3"] + t["a_b3"]
    ch1 = np.tanh(obs @ t["c_w1"] + t["c_b1"])
    ch2 = np.tanh(ch1 @ t["c_w2"] + t["c_b2"])
    values = (ch2 @ t["c_w3"] + t["c_b3"])[:, 0]
    cache = (obs, ah1, ah2, ch1, ch2)
    return logits, values, cache


def backward(params: ActorCriticParams, cache, dlogits: np.ndarray, dvalues: np.ndarray) -> dict:
    """Exact reverse-mode gradients given upstream d(loss)/d(logits), d(loss)/d(values)."""
    obs, ah1, ah2, ch1, ch2 = cache
    t = params.tensors
    g = {}

    dz = np.asarray(dlogits, dtype=np.float64)
    g["a_w3"] = ah2.T @ dz
    g["a_b3"] = dz.sum(axis=0)
    dh = (dz @ t["a_w3"].T) * (1.0 - ah2 * ah2)
    g["a_w2"] = ah1.T @ dh
    g["a_b2"] = dh.sum(axis=0)
    dh = (dh @ t["a_w2"].T) * (1.0 - ah1 * ah1)
    g["a_w1"] = obs.T @ dh
    g["a_b1"] = dh.sum(axis=0)

    dv = np.asarray(dvalues, dtype=np.float64).reshape(-1, 1)
    g["c_w3"] = ch2.T @ dv
    g["c_b3"] = dv.sum(axis=0)
    dh = (dv @ t["c_w3"].T) * (1.0 - ch2 * ch2)
    g["c_w2"] = ch1.T @ dh
    g["c_b2"] = dh.sum(axis=0)
    dh = (dh @ t["c_w2"].T) * (1.0 - ch1 * ch1)
    g["c_w1"] = obs.T @ dh
    g["c_b1"] = dh.sum(axis=0)

    for k, v in g.items():
        if not np.all(np.isfinite(v)):
            raise NumericalError(f"non-finite gradient in {k}")
    return g


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def sample_action(logits: np.ndarray, rng: np.random.Generator):
    """Draw one action from softmax(logits); returns (action, logprob)."""
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(logits)):
        raise NumericalError("non-finite logits in sample_action")
    p = softmax(logits)
    u = rng.random()
    action = int(np.searchsorted(np.cumsum(p), u))
    action = min(action, logits.shape[-1] - 1)  # guard u==1.0 edge
    return action, float(log_softmax(logits)[action])


def logprob_entropy(logits: np.ndarray, actions: np.ndarray):
    """Row-wise log pi(a|s) and policy entropy for a batch of logits."""
    logp = log_softmax(np.asarray(logits, dtype=np.float64))
    actions = np.asarray(actions, dtype=np.intp)
    rows = np.arange(logp.shape[0])
    p = np.exp(logp)
    entropies = -(p * logp).sum(axis=1)
    return logp[rows, actions], entropies


def entropy_grad(logits: np.ndarray) -> np.ndarray:
    """d(entropy_i)/d(logits_ij); rows are independent."""
    logp = log_softmax(np.asarray(logits, dtype=np.float64))
    p = np.exp(logp)
    h = -(p * logp).sum(axis=1, keepdims=True)
    return -p * (logp + h)


def global_grad_norm(grads: dict) -> float:
    return float(np.sqrt(sum(float((g * g).sum()) for g in grads.values())))


def clip_grad_norm(grads: dict, max_norm: float):
    """Scale all gradients so the global L2 norm is at most max_norm."""
    norm = global_grad_norm(grads)
    if norm > max_norm:
        scale = max_norm / norm
        grads = {k: g * scale for k, g in grads.items()}
    return grads, norm


def adam_init(params: ActorCriticParams) -> AdamState:
    return AdamState(m=zeros_like_params(params), v=zeros_like_params(params), t=0)


def adam_step(
    params: ActorCriticParams,
    grads: dict,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
):
    """One bias-corrected Adam update; returns (new_params, new_state)."""
    t = state.t + 1
    bc1 = 1.0 - beta1 ** t
    bc2 = 1.0 - beta2 ** t
    new_t, new_m, new_v = {}, {}, {}
    for k, p in params.tensors.items():
        g = grads[k]
        m = beta1 * state.m[k] + (1.0 - beta1) * g
        v = beta2 * state.v[k] + (1.0 - beta2) * (g * g)
        new_t[k] = p - lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
        new_m[k] = m
        new_v[k] = v
    out = ActorCriticParams(params.obs_dim, params.n_actions, new_t)
    return out, AdamState(m=new_m, v=new_v, t=t)


def check_finite(params: ActorCriticParams) -> None:
    for k, v in params.tensors.items():
        if not np.all(np.isfinite(v)):
            raise NumericalError(f"non-finite parameter values in {k}")
