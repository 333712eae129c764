"""Parser for the intuition-net config language.

See docs/net-format.md for the grammar (EBNF) and a walkthrough.  In short:

    net "<name>" env "<envname>"
    node <id> { states: [<s1>, <s2>, ...] }
    action node <id> { states: [...], parents: [<id>, ...] }
    cpt <id> | <parent>=<state>, ... -> [p1, p2, ...]
    weight <action-node>=<state> -> <w>
    map (<childid>=<state>, ...) -> <env-action-name>
    map (...) -> argmax(<childid>=<state>: <action>, ...)

'#' starts a comment.  Every action node needs a complete, normalized CPT
(one row per joint parent assignment).  If no map lines are given, the net
must have a single action node whose state labels equal the environment's
action names, which are then matched by name.  All errors carry line:column.
"""

from __future__ import annotations

import hashlib
import itertools
from pathlib import Path

import numpy as np

from ..envs import get_spec
from ..errors import ConfigError
from .model import IntuitionNet, IntuitionNode, MarginalChoice

ROW_SUM_TOL = 1e-9

_PUNCT = ("->", "{", "}", "[", "]", "(", ")", "|", ",", "=", ":")


class NetParseError(ConfigError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class _Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind      # "ident" | "string" | "number" | punctuation literal
        self.value = value
        self.line = line
        self.col = col


def _tokenize(text: str):
    tokens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        i = 0
        while i < len(line):
            ch = line[i]
            if ch == "#":
                break
            if ch.isspace():
                i += 1
                continue
            col = i + 1
            if ch == '"':
                j = line.find('"', i + 1)
                if j < 0:
                    raise NetParseError("unterminated string", lineno, col)
                tokens.append(_Token("string", line[i + 1 : j], lineno, col))
                i = j + 1
                continue
            for p in _PUNCT:
                if line.startswith(p, i):
                    tokens.append(_Token(p, p, lineno, col))
                    i += len(p)
                    break
            else:
                j = i
                while j < len(line) and (line[j].isalnum() or line[j] in "._+-"):
                    j += 1
                if j == i:
                    raise NetParseError(f"unexpected character {ch!r}", lineno, col)
                word = line[i:j]
                try:
                    tokens.append(_Token("number", float(word), lineno, col))
                except ValueError:
                    tokens.append(_Token("ident", word, lineno, col))
                i = j
    return tokens


class _Stream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, kind=None, what=None):
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("ident", "", 1, 1)
            raise NetParseError(f"unexpected end of file (expected {what or kind})",
                                last.line, last.col)
        if kind is not None and tok.kind != kind:
            raise NetParseError(
                f"expected {what or kind}, got {tok.value!r}", tok.line, tok.col
            )
        self.pos += 1
        return tok

    def accept(self, kind):
        tok = self.peek()
        if tok is not None and tok.kind == kind:
            self.pos += 1
            return tok
        return None


def _parse_cond_list(ts, end_kinds):
    """Parse 'a=x, b=y, ...' until one of end_kinds; returns [(name, state, tok)]."""
    out = []
    while True:
        name = ts.next("ident", "node name")
        ts.next("=", "'='")
        state = ts.next("ident", "state label")
        out.append((name.value, state.value, name))
        tok = ts.peek()
        if tok is not None and tok.kind == ",":
            ts.next(",")
            continue
        if tok is not None and tok.kind in end_kinds:
            return out
        if tok is None:
            raise NetParseError("unexpected end of file in condition list",
                                name.line, name.col)
        raise NetParseError(f"expected ',' or one of {end_kinds}, got {tok.value!r}",
                            tok.line, tok.col)


def _parse_ident_list(ts):
    ts.next("[", "'['")
    out = []
    while True:
        tok = ts.next("ident", "identifier")
        out.append(tok.value)
        if ts.accept(","):
            continue
        ts.next("]", "']'")
        return out


def _parse_number_list(ts):
    ts.next("[", "'['")
    out = []
    while True:
        tok = ts.next("number", "number")
        out.append(float(tok.value))
        if ts.accept(","):
            continue
        ts.next("]", "']'")
        return out


def parse_net(text: str, source_path: str = "") -> IntuitionNet:
    ts = _Stream(_tokenize(text))

    head = ts.next("ident", "'net'")
    if head.value != "net":
        raise NetParseError("file must start with a net declaration", head.line, head.col)
    net_name = ts.next("string", "net name string").value
    env_kw = ts.next("ident", "'env'")
    if env_kw.value != "env":
        raise NetParseError("expected 'env' after net name", env_kw.line, env_kw.col)
    env_name = ts.next("string", "environment name string").value
    try:
        env_spec = get_spec(env_name)
    except ConfigError:
        raise NetParseError(f"unknown environment '{env_name}'", env_kw.line, env_kw.col)

    nodes: dict = {}
    node_tok: dict = {}
    cpt_rows: dict = {}    # node -> {row_index: probs}
    weights: dict = {}     # (node, state_idx) -> float
    map_entries: list = [] # (config_index or None later, ...)
    raw_maps: list = []    # (conds, target, tok)

    while ts.peek() is not None:
        tok = ts.next("ident", "statement keyword")
        kw = tok.value

        if kw in ("node", "action"):
            is_action = kw == "action"
            if is_action:
                node_kw = ts.next("ident", "'node'")
                if node_kw.value != "node":
                    raise NetParseError("expected 'node' after 'action'",
                                        node_kw.line, node_kw.col)
            name_tok = ts.next("ident", "node name")
            name = name_tok.value
            if name in nodes:
                raise NetParseError(f"duplicate node '{name}'", name_tok.line, name_tok.col)
            ts.next("{", "'{'")
            states, parents = None, []
            while not ts.accept("}"):
                field_tok = ts.next("ident", "'states' or 'parents'")
                ts.next(":", "':'")
                if field_tok.value == "states":
                    states = _parse_ident_list(ts)
                elif field_tok.value == "parents":
                    parents = _parse_ident_list(ts)
                else:
                    raise NetParseError(f"unknown field '{field_tok.value}'",
                                        field_tok.line, field_tok.col)
                ts.accept(",")
            if states is None or len(states) < 2:
                raise NetParseError(f"node '{name}' needs at least 2 states",
                                    name_tok.line, name_tok.col)
            if len(set(states)) != len(states):
                raise NetParseError(f"node '{name}' has duplicate state labels",
                                    name_tok.line, name_tok.col)
            if is_action and not parents:
                raise NetParseError(f"action node '{name}' needs at least one parent",
                                    name_tok.line, name_tok.col)
            nodes[name] = IntuitionNode(name, tuple(states), tuple(parents), is_action)
            node_tok[name] = name_tok

        elif kw == "cpt":
            name_tok = ts.next("ident", "node name")
            name = name_tok.value
            if name not in nodes:
                raise NetParseError(f"cpt for unknown node '{name}'",
                                    name_tok.line, name_tok.col)
            node = nodes[name]
            conds = []
            if ts.accept("|"):
                conds = _parse_cond_list(ts, ("->",))
            ts.next("->", "'->'")
            probs = _parse_number_list(ts)

            cond_names = [c[0] for c in conds]
            if sorted(cond_names) != sorted(node.parents):
                raise NetParseError(
                    f"cpt row for '{name}' must condition on exactly its parents "
                    f"{list(node.parents)}", name_tok.line, name_tok.col)
            state_idx = {}
            for pname, plabel, ptok in conds:
                pnode = nodes.get(pname)
                if pnode is None:
                    raise NetParseError(f"unknown parent '{pname}'", ptok.line, ptok.col)
                if plabel not in pnode.states:
                    raise NetParseError(f"node '{pname}' has no state '{plabel}'",
                                        ptok.line, ptok.col)
                state_idx[pname] = pnode.states.index(plabel)
            if len(probs) != len(node.states):
                raise NetParseError(
                    f"cpt row for '{name}' has {len(probs)} entries, "
                    f"expected {len(node.states)}", name_tok.line, name_tok.col)
            if min(probs) < 0.0 or max(probs) > 1.0:
                raise NetParseError(f"cpt row for '{name}' has entries outside [0, 1]",
                                    name_tok.line, name_tok.col)
            if abs(sum(probs) - 1.0) > ROW_SUM_TOL:
                raise NetParseError(
                    f"cpt row for '{name}' sums to {sum(probs):.12g}, not 1",
                    name_tok.line, name_tok.col)
            # Mixed-radix row index over declared parent order.
            sizes = [len(nodes[p].states) for p in node.parents]
            row = 0
            for p, size in zip(node.parents, sizes):
                row = row * size + state_idx[p]
            rows = cpt_rows.setdefault(name, {})
            if row in rows:
                raise NetParseError(f"duplicate cpt row for '{name}'",
                                    name_tok.line, name_tok.col)
            rows[row] = probs

        elif kw == "weight":
            name_tok = ts.next("ident", "action node name")
            ts.next("=", "'='")
            state_tok = ts.next("ident", "state label")
            ts.next("->", "'->'")
            w = float(ts.next("number", "weight value").value)
            node = nodes.get(name_tok.value)
            if node is None or not node.is_action:
                raise NetParseError(f"weight target '{name_tok.value}' is not an action node",
                                    name_tok.line, name_tok.col)
            if state_tok.value not in node.states:
                raise NetParseError(f"node '{name_tok.value}' has no state '{state_tok.value}'",
                                    state_tok.line, state_tok.col)
            if w <= 0.0:
                raise NetParseError("mismatch weights must be positive",
                                    name_tok.line, name_tok.col)
            weights[(name_tok.value, node.states.index(state_tok.value))] = w

        elif kw == "map":
            paren = ts.next("(", "'('")
            conds = _parse_cond_list(ts, (")",))
            ts.next(")", "')'")
            ts.next("->", "'->'")
            target_tok = ts.next("ident", "environment action name")
            if target_tok.value == "argmax":
                ts.next("(", "'('")
                options = []
                while True:
                    n = ts.next("ident", "action node name")
                    ts.next("=", "'='")
                    s = ts.next("ident", "state label")
                    ts.next(":", "':'")
                    a = ts.next("ident", "environment action name")
                    options.append((n, s, a))
                    if ts.accept(","):
                        continue
                    ts.next(")", "')'")
                    break
                if len(options) < 2:
                    raise NetParseError("argmax target needs at least two options",
                                        target_tok.line, target_tok.col)
                raw_maps.append((conds, ("argmax", options), paren))
            else:
                raw_maps.append((conds, ("action", target_tok), paren))
        else:
            raise NetParseError(f"unknown statement '{kw}'", tok.line, tok.col)

    # --- structural validation -------------------------------------------
    for node in nodes.values():
        for p in node.parents:
            if p not in nodes:
                t = node_tok[node.name]
                raise NetParseError(f"node '{node.name}' lists unknown parent '{p}'",
                                    t.line, t.col)
            if nodes[p].is_action:
                t = node_tok[node.name]
                raise NetParseError(
                    f"node '{node.name}' has action node '{p}' as parent", t.line, t.col)

    # Cycle check (self-loops included) via iterative removal of sinks.
    remaining = {n: set(node.parents) for n, node in nodes.items()}
    while remaining:
        roots = [n for n, ps in remaining.items() if not ps]
        if not roots:
            name = min(remaining)
            t = node_tok[name]
            raise NetParseError(f"cycle detected involving node '{name}'", t.line, t.col)
        for r in roots:
            del remaining[r]
        for ps in remaining.values():
            ps.difference_update(roots)

    action_nodes = tuple(n for n, node in nodes.items() if node.is_action)
    parent_nodes = tuple(n for n, node in nodes.items() if not node.is_action)
    if not action_nodes:
        raise NetParseError("net has no action node", head.line, head.col)

    # Complete CPTs for every action node; optional but validated elsewhere.
    cpts = {}
    for name in action_nodes:
        node = nodes[name]
        n_rows = int(np.prod([len(nodes[p].states) for p in node.parents]))
        rows = cpt_rows.get(name, {})
        if len(rows) != n_rows:
            t = node_tok[name]
            raise NetParseError(
                f"action node '{name}' has {len(rows)} cpt rows, needs {n_rows}",
                t.line, t.col)
        table = np.zeros((n_rows, len(node.states)))
        for r, probs in rows.items():
            table[r] = probs
        cpts[name] = table
    for name in parent_nodes:
        if name in cpt_rows:
            node = nodes[name]
            n_rows = int(np.prod([len(nodes[p].states) for p in node.parents])) if node.parents else 1
            if len(cpt_rows[name]) != n_rows:
                t = node_tok[name]
                raise NetParseError(
                    f"node '{name}' has {len(cpt_rows[name])} cpt rows, needs {n_rows}",
                    t.line, t.col)

    # --- action mapping ----------------------------------------------------
    shape = tuple(len(nodes[a].states) for a in action_nodes)
    n_configs = int(np.prod(shape))
    action_names = env_spec.action_names

    def env_action_index(tok):
        if tok.value not in action_names:
            raise NetParseError(
                f"'{tok.value}' is not an action of '{env_name}' "
                f"(valid: {', '.join(action_names)})", tok.line, tok.col)
        return action_names.index(tok.value)

    action_map = [None] * n_configs
    if raw_maps:
        for conds, target, tok in raw_maps:
            cond_names = [c[0] for c in conds]
            if sorted(cond_names) != sorted(action_nodes):
                raise NetParseError(
                    f"map must assign every action node exactly once "
                    f"({list(action_nodes)})", tok.line, tok.col)
            idx_parts = []
            for a in action_nodes:
                label = next(c[1] for c in conds if c[0] == a)
                if label not in nodes[a].states:
                    raise NetParseError(f"node '{a}' has no state '{label}'",
                                        tok.line, tok.col)
                idx_parts.append(nodes[a].states.index(label))
            cfg = int(np.ravel_multi_index(tuple(idx_parts), shape))
            if action_map[cfg] is not None:
                raise NetParseError("duplicate map entry for this configuration",
                                    tok.line, tok.col)
            if target[0] == "action":
                action_map[cfg] = env_action_index(target[1])
            else:
                options = []
                for n, s, a in target[1]:
                    if n.value not in action_nodes:
                        raise NetParseError(f"'{n.value}' is not an action node",
                                            n.line, n.col)
                    if s.value not in nodes[n.value].states:
                        raise NetParseError(f"node '{n.value}' has no state '{s.value}'",
                                            s.line, s.col)
                    options.append((n.value, nodes[n.value].states.index(s.value),
                                    env_action_index(a)))
                action_map[cfg] = MarginalChoice(tuple(options))
        missing = [i for i, t in enumerate(action_map) if t is None]
        if missing:
            raise NetParseError(
                f"action mapping is not total: {len(missing)} configurations unmapped",
                head.line, head.col)
    else:
        if len(action_nodes) != 1 or set(nodes[action_nodes[0]].states) != set(action_names):
            raise NetParseError(
                "no map lines: the net must have a single action node whose states "
                "match the environment's action names", head.line, head.col)
        node = nodes[action_nodes[0]]
        action_map = [action_names.index(s) for s in node.states]

    config_weights = np.ones(n_configs)
    for cfg in range(n_configs):
        for a, state_idx in zip(action_nodes, np.unravel_index(cfg, shape)):
            config_weights[cfg] *= weights.get((a, int(state_idx)), 1.0)

    return IntuitionNet(
        name=net_name,
        env_name=env_name,
        nodes=nodes,
        cpts=cpts,
        action_nodes=action_nodes,
        parent_nodes=parent_nodes,
        env_action_names=tuple(action_names),
        action_map=action_map,
        config_weights=config_weights,
        source_hash=hashlib.sha256(text.encode()).hexdigest(),
        source_path=source_path,
    )


def load_net(path) -> IntuitionNet:
    path = Path(path)
    return parse_net(path.read_text(), source_path=str(path))
