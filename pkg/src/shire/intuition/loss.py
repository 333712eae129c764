"""Intuitive-action targets and the multiclass hinge loss on policy logits.

The per-sample loss is

    w_i * max(0, margin - (z_i[e_i] - max_{j != e_i} z_i[j]))

averaged over the batch, where e_i is the intuitive action inferred from
the net.  For two actions with signed score s = z[1] - z[0] and signed
label m in {-1, +1} this is exactly max(0, 1 - m*s).  The subgradient at
the hinge point is taken as zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .encoders import BatchEncoder
from .model import IntuitionNet, MarginalChoice, parent_radices


@dataclass
class IntuitionTargets:
    actions: np.ndarray   # (n,) intuitive environment-action indices
    weights: np.ndarray   # (n,) positive mismatch weights
    config_indices: np.ndarray  # (n,) chosen child-configuration index (diagnostic)


def _state_translation(net: IntuitionNet, encoder: BatchEncoder, node: str) -> np.ndarray:
    """Permutation from encoder state order to the net's declared order."""
    enc_states = encoder.node_states(node)
    net_states = net.nodes[node].states
    if set(enc_states) != set(net_states):
        raise ConfigError(
            f"net '{net.name}' node '{node}' states {list(net_states)} do not match "
            f"encoder states {list(enc_states)} for '{encoder.env_name}'"
        )
    return np.array([net_states.index(s) for s in enc_states], dtype=np.intp)


def joint_posteriors(net: IntuitionNet, encoder: BatchEncoder, obs_batch: np.ndarray) -> np.ndarray:
    """(n, n_configs) joint posterior over child configurations per sample."""
    if encoder.env_name != net.env_name:
        raise ConfigError(
            f"net '{net.name}' targets environment '{net.env_name}', "
            f"got encoder for '{encoder.env_name}'"
        )
    enc_idx = encoder.encode_batch(net.parent_nodes, obs_batch)
    state_idx = {
        node: _state_translation(net, encoder, node)[enc_idx[node]]
        for node in net.parent_nodes
    }
    n = next(iter(state_idx.values())).shape[0] if state_idx else np.atleast_2d(obs_batch).shape[0]
    joint = np.ones((n, 1))
    for name in net.action_nodes:
        node = net.nodes[name]
        rows = np.zeros(n, dtype=np.intp)
        for p, r in zip(node.parents, parent_radices(net, node)):
            rows += state_idx[p] * r
        table = net.cpts[name][rows]  # (n, k)
        joint = (joint[:, :, None] * table[:, None, :]).reshape(n, -1)
    return joint


def compute_targets(
    net: IntuitionNet,
    encoder: BatchEncoder,
    obs_batch: np.ndarray,
    mode: str = "map",
    rng=None,
) -> IntuitionTargets:
    """Vectorized intuitive action e_i and mismatch weight w_i per sample."""
    joint = joint_posteriors(net, encoder, obs_batch)
    n, n_configs = joint.shape
    if mode == "map":
        cfg = np.argmax(joint, axis=1)
    elif mode == "sample":
        if rng is None:
            raise ConfigError("sample target mode requires an rng")
        cum = np.cumsum(joint / joint.sum(axis=1, keepdims=True), axis=1)
        u = rng.random((n, 1))
        cfg = np.minimum((cum < u).sum(axis=1), n_configs - 1)
    else:
        raise ConfigError(f"unknown target mode '{mode}' (use 'map' or 'sample')")

    static = np.array(
        [t if not isinstance(t, MarginalChoice) else -1 for t in net.action_map],
        dtype=np.intp,
    )
    actions = static[cfg]
    if np.any(actions < 0):
        shape = net.config_shape()
        joint_nd = joint.reshape((n,) + shape)
        for cfg_idx, target in enumerate(net.action_map):
            if not isinstance(target, MarginalChoice):
                continue
            sel = cfg == cfg_idx
            if not np.any(sel):
                continue
            marginals = []
            for node_name, state_index, env_action in target.options:
                axis = 1 + net.action_nodes.index(node_name)
                marginals.append(np.take(joint_nd[sel], state_index, axis=axis)
                                 .reshape(int(sel.sum()), -1).sum(axis=1))
            choice = np.argmax(np.stack(marginals, axis=1), axis=1)
            env_actions = np.array([o[2] for o in target.options], dtype=np.intp)
            actions[sel] = env_actions[choice]
    return IntuitionTargets(
        actions=actions,
        weights=net.config_weights[cfg],
        config_indices=cfg,
    )


def intuition_loss(logits: np.ndarray, targets: IntuitionTargets, margin: float = 1.0) -> float:
    loss, _ = intuition_loss_grad(logits, targets, margin)
    return loss


def intuition_loss_grad(logits: np.ndarray, targets: IntuitionTargets, margin: float = 1.0):
    """Loss and its (sub)gradient with respect to the logits."""
    z = np.asarray(logits, dtype=np.float64)
    n = z.shape[0]
    rows = np.arange(n)
    e = targets.actions
    z_e = z[rows, e]
    masked = z.copy()
    masked[rows, e] = -np.inf
    runner = np.argmax(masked, axis=1)
    gap = margin - (z_e - masked[rows, runner])
    active = gap > 0.0
    w = targets.weights
    loss = float(np.sum(w * np.maximum(gap, 0.0)) / n)

    grad = np.zeros_like(z)
    coeff = np.where(active, w / n, 0.0)
    np.subtract.at(grad, (rows, e), coeff)
    np.add.at(grad, (rows, runner), coeff)
    return loss, grad


def mismatch_vector(actions: np.ndarray, targets: IntuitionTargets) -> np.ndarray:
    """+1 where the executed action agrees with the intuitive one, else -1."""
    return np.where(np.asarray(actions) == targets.actions, 1, -1)
