"""Hand-specified discrete Bayesian networks over abstract states.

An IntuitionNet is a DAG whose child (action) nodes carry conditional
probability tables over their parents; the parents are always fully
observed via the abstract-state encoders, so the posterior over the joint
child configuration is the product of one CPT row per action node.

Child configurations are ordered row-major over the action nodes in
declaration order (the last node's state varies fastest); every tie-break
("map" mode argmax, sampling boundaries) resolves to the earliest
configuration in that order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, UsageError


@dataclass(frozen=True)
class IntuitionNode:
    name: str
    states: tuple
    parents: tuple
    is_action: bool


@dataclass(frozen=True)
class MarginalChoice:
    """Runtime-resolved map target: pick the alternative whose (node=state)
    marginal posterior is largest; ties go to the first listed."""

    options: tuple  # of (node_name, state_index, env_action_index)


@dataclass
class IntuitionNet:
    name: str
    env_name: str
    nodes: dict                 # name -> IntuitionNode, declaration-ordered
    cpts: dict                  # name -> (n_rows, n_states) array
    action_nodes: tuple         # action-node names, declaration order
    parent_nodes: tuple         # non-action node names, declaration order
    env_action_names: tuple
    action_map: list            # config index -> int env action | MarginalChoice
    config_weights: np.ndarray  # (n_configs,) mismatch weight per configuration
    source_hash: str = ""
    source_path: str = ""

    @property
    def size(self) -> int:
        return len(self.nodes)

    @property
    def n_configs(self) -> int:
        return len(self.action_map)

    def config_shape(self) -> tuple:
        return tuple(len(self.nodes[a].states) for a in self.action_nodes)

    def config_labels(self, index: int) -> dict:
        """Decode a configuration index into {action node -> state label}."""
        out = {}
        for name, state_idx in zip(self.action_nodes, np.unravel_index(index, self.config_shape())):
            out[name] = self.nodes[name].states[int(state_idx)]
        return out


def parent_radices(net: IntuitionNet, node: IntuitionNode) -> tuple:
    """Mixed-radix multipliers for a node's CPT row index (first parent most
    significant)."""
    sizes = [len(net.nodes[p].states) for p in node.parents]
    radix = []
    mult = 1
    for s in reversed(sizes):
        radix.append(mult)
        mult *= s
    return tuple(reversed(radix))


def cpt_row_index(net: IntuitionNet, node: IntuitionNode, parent_state_idx: dict) -> int:
    idx = 0
    for p, r in zip(node.parents, parent_radices(net, node)):
        idx += parent_state_idx[p] * r
    return idx


def infer_action_posterior(net: IntuitionNet, assignment: dict) -> np.ndarray:
    """Exact joint posterior over child configurations given fully observed
    parents: the product of each action node's CPT row."""
    state_idx = {}
    for name in net.parent_nodes:
        if name not in assignment:
            raise UsageError(f"assignment missing parent node '{name}'")
        node = net.nodes[name]
        label = assignment[name]
        if label not in node.states:
            raise UsageError(f"node '{name}' has no state '{label}'")
        state_idx[name] = node.states.index(label)
    extra = set(assignment) - set(net.parent_nodes)
    if extra:
        raise UsageError(f"assignment names non-parent nodes: {sorted(extra)}")

    posterior = np.ones(1)
    for name in net.action_nodes:
        node = net.nodes[name]
        row = net.cpts[name][cpt_row_index(net, node, state_idx)]
        posterior = (posterior[:, None] * row[None, :]).reshape(-1)
    return posterior


def resolve_config_action(net: IntuitionNet, config_index: int, posterior: np.ndarray) -> int:
    """Map a child configuration to an environment action index."""
    target = net.action_map[config_index]
    if isinstance(target, MarginalChoice):
        best_action, best_p = None, -1.0
        for node_name, state_index, env_action in target.options:
            p = float(marginal(net, posterior, node_name, state_index))
            if p > best_p:
                best_action, best_p = env_action, p
        return best_action
    return target


def marginal(net: IntuitionNet, posterior: np.ndarray, node_name: str, state_index: int) -> float:
    axis = net.action_nodes.index(node_name)
    joint = posterior.reshape(net.config_shape())
    return float(np.take(joint, state_index, axis=axis).sum())


def intuitive_action(net: IntuitionNet, posterior: np.ndarray, mode: str = "map", rng=None) -> int:
    """Select a child configuration (argmax or sampled) and map it to an
    environment action."""
    posterior = np.asarray(posterior, dtype=np.float64)
    if posterior.shape != (net.n_configs,):
        raise UsageError(
            f"posterior has shape {posterior.shape}, expected ({net.n_configs},)"
        )
    if mode == "map":
        config_index = int(np.argmax(posterior))
    elif mode == "sample":
        if rng is None:
            raise UsageError("sample mode requires an rng")
        cum = np.cumsum(posterior / posterior.sum())
        config_index = min(int(np.searchsorted(cum, rng.random(), side="right")),
                           net.n_configs - 1)
    else:
        raise ConfigError(f"unknown target mode '{mode}' (use 'map' or 'sample')")
    return resolve_config_action(net, config_index, posterior)
