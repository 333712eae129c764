"""On-policy PPO with clipped surrogate, GAE, and the optional intuition
hinge term.

The total minibatch loss is

    loss = loss_policy + value_coef * loss_value - entropy_coef * mean(H)
         + intuition_coef * loss_intuition          (when enabled)

with exact gradients assembled from d(loss)/d(logits) and d(loss)/d(values)
and pushed through the network by nn.backward.  Intuitive-action targets
are computed once per rollout, from the buffer's raw observations.  When
the intuition flag is off (or the coefficient is zero) the update performs
bit-identical arithmetic to the baseline path and consumes no extra draws
from the shared RNG streams.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np

from . import envs, nn
from .errors import ConfigError, NumericalError
from .intuition import (
    IntuitionTargets,
    compute_targets,
    get_encoder,
    intuition_loss_grad,
    mismatch_vector,
)
from .reports import CurvePoint, RunReport


@dataclass
class PPOConfig:
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_eps: float = 0.2
    lr: float = 3e-4
    n_steps: int = 2048
    minibatch_size: int = 64
    n_epochs: int = 10
    entropy_coef: float = 0.0
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    intuition_enabled: bool = False
    intuition_coef: float = 0.5
    target_mode: str = "map"
    seed: int = 0

    def validate(self) -> None:
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError(f"gamma must be in (0, 1], got {self.gamma}")
        if not 0.0 <= self.gae_lambda <= 1.0:
            raise ConfigError(f"gae_lambda must be in [0, 1], got {self.gae_lambda}")
        if self.clip_eps <= 0.0 or self.lr <= 0.0 or self.max_grad_norm <= 0.0:
            raise ConfigError("clip_eps, lr and max_grad_norm must be positive")
        if self.entropy_coef < 0.0 or self.value_coef < 0.0 or self.intuition_coef < 0.0:
            raise ConfigError("loss coefficients must be non-negative")
        if self.n_steps < 1 or self.minibatch_size < 1 or self.n_epochs < 1:
            raise ConfigError("n_steps, minibatch_size and n_epochs must be positive")
        if self.n_steps % self.minibatch_size != 0:
            raise ConfigError(
                f"minibatch_size {self.minibatch_size} must divide n_steps {self.n_steps}"
            )
        if self.target_mode not in ("map", "sample"):
            raise ConfigError(f"target_mode must be 'map' or 'sample', got {self.target_mode!r}")


class RolloutBuffer:
    """Fixed-capacity store of on-policy transitions plus GAE outputs."""

    def __init__(self, n_steps: int, env_spec: envs.EnvSpec):
        self.env_spec = env_spec
        self.n_steps = n_steps
        self.obs = np.zeros((n_steps, env_spec.raw_obs_dim))
        self.actions = np.zeros(n_steps, dtype=np.intp)
        self.rewards = np.zeros(n_steps)
        self.terminated = np.zeros(n_steps, dtype=bool)
        self.truncated = np.zeros(n_steps, dtype=bool)
        self.logprobs = np.zeros(n_steps)
        self.values = np.zeros(n_steps)
        # Critic value of the observation after step t, for bootstrapping
        # across truncation boundaries only.
        self.bootstrap_values = np.zeros(n_steps)
        self.last_value = 0.0     # critic value of the state after the final step
        self.final_obs = None     # raw observation to resume collection from
        self.advantages = None
        self.returns = None


def collect_rollout(env, params: nn.ActorCriticParams, n_steps: int,
                    rng: np.random.Generator, start_obs=None) -> RolloutBuffer:
    """Collect exactly n_steps transitions, auto-resetting finished episodes."""
    spec = env.spec
    buf = RolloutBuffer(n_steps, spec)
    obs = env.reset() if start_obs is None else start_obs
    for t in range(n_steps):
        feats = envs.featurize(spec, obs[None, :])
        logits, values = nn.forward(params, feats)
        action, logprob = nn.sample_action(logits[0], rng)
        result = env.step(action)

        buf.obs[t] = obs
        buf.actions[t] = action
        buf.rewards[t] = result.reward
        buf.terminated[t] = result.terminated
        buf.truncated[t] = result.truncated
        buf.logprobs[t] = logprob
        buf.values[t] = values[0]

        if result.truncated:
            feats = envs.featurize(spec, result.obs[None, :])
            _, v = nn.forward(params, feats)
            buf.bootstrap_values[t] = v[0]
        if result.terminated or result.truncated:
            obs = env.reset()
        else:
            obs = result.obs
    if not (buf.terminated[-1] or buf.truncated[-1]):
        feats = envs.featurize(spec, obs[None, :])
        _, v = nn.forward(params, feats)
        buf.last_value = float(v[0])
    buf.final_obs = obs
    return buf


def compute_gae(buffer: RolloutBuffer, gamma: float, gae_lambda: float,
                last_value: float | None = None):
    """Standard GAE recursion; bootstrapping is suppressed across terminated
    boundaries and uses the stored next-state value across truncated ones."""
    n = buffer.n_steps
    if last_value is None:
        last_value = buffer.last_value
    adv = np.zeros(n)
    gae = 0.0
    for t in range(n - 1, -1, -1):
        if buffer.terminated[t]:
            next_value, cont = 0.0, 0.0
        elif buffer.truncated[t]:
            next_value, cont = buffer.bootstrap_values[t], 0.0
        elif t == n - 1:
            next_value, cont = last_value, 1.0
        else:
            next_value, cont = buffer.values[t + 1], 1.0
        delta = buffer.rewards[t] + gamma * next_value - buffer.values[t]
        gae = delta + gamma * gae_lambda * cont * gae
        adv[t] = gae
    buffer.advantages = adv
    buffer.returns = adv + buffer.values
    return buffer.advantages, buffer.returns


def minibatch_loss_grads(params, feats, actions, old_logprobs, advantages,
                         returns, config: PPOConfig, targets=None):
    """Total loss, its components, and exact parameter gradients for one
    minibatch.  Returns (metrics dict, grads dict)."""
    n = feats.shape[0]
    logits, values, cache = nn.forward_cached(params, feats)
    logp_all = nn.log_softmax(logits)
    probs = np.exp(logp_all)
    rows = np.arange(n)
    logp = logp_all[rows, actions]
    entropy = -(probs * logp_all).sum(axis=1)

    ratio = np.exp(logp - old_logprobs)
    surr1 = ratio * advantages
    clipped_ratio = np.clip(ratio, 1.0 - config.clip_eps, 1.0 + config.clip_eps)
    surr2 = clipped_ratio * advantages
    loss_policy = float(-np.minimum(surr1, surr2).mean())

    # d(loss_policy)/d(logp): the clipped branch has zero slope wherever it
    # is the active minimum (ratio is outside the clip band there).
    dlp = np.where(surr1 <= surr2, -advantages * ratio / n, 0.0)
    dlogits = dlp[:, None] * (np.eye(logits.shape[1])[actions] - probs)

    err = values - returns
    loss_value = float((err * err).mean())
    dvalues = config.value_coef * 2.0 * err / n

    mean_entropy = float(entropy.mean())
    loss_entropy_term = -config.entropy_coef * mean_entropy
    if config.entropy_coef != 0.0:
        dlogits = dlogits + (-config.entropy_coef / n) * nn.entropy_grad(logits)

    loss_intuition = 0.0
    lam = config.intuition_coef
    if targets is not None:
        loss_intuition, dlogits_int = intuition_loss_grad(logits, targets)
        if lam != 0.0:
            dlogits = dlogits + lam * dlogits_int

    loss_ppo = loss_policy + config.value_coef * loss_value + loss_entropy_term
    loss_total = loss_ppo + lam * loss_intuition if targets is not None else loss_ppo
    if not np.isfinite(loss_total):
        raise NumericalError(f"non-finite loss: {loss_total}")

    grads = nn.backward(params, cache, dlogits, dvalues)
    metrics = {
        "loss_policy": loss_policy,
        "loss_value": loss_value,
        "loss_entropy": loss_entropy_term,
        "loss_intuition": float(loss_intuition),
        "loss_total": float(loss_total),
        "entropy": mean_entropy,
        "clip_fraction": float((np.abs(ratio - 1.0) > config.clip_eps).mean()),
        "max_ratio_err": float(np.abs(ratio - 1.0).max()),
    }
    return metrics, grads


def ppo_update(params: nn.ActorCriticParams, adam_state: nn.AdamState,
               buffer: RolloutBuffer, config: PPOConfig,
               shuffle_rng: np.random.Generator, targets=None):
    """n_epochs of shuffled minibatch updates over a full buffer.

    Returns (params, adam_state, metrics); metrics are averages over all
    minibatches except ratio/advantage diagnostics, which come from the
    whole batch.
    """
    if buffer.advantages is None:
        raise ConfigError("ppo_update needs compute_gae to run on the buffer first")
    n = buffer.n_steps
    adv = buffer.advantages
    adv = (adv - adv.mean()) / max(float(adv.std()), 1e-8)

    feats = envs.featurize(buffer.env_spec, buffer.obs)
    accum: dict = {}
    n_batches = 0
    first_ratio_err = None
    for epoch in range(config.n_epochs):
        perm = shuffle_rng.permutation(n)
        for start in range(0, n, config.minibatch_size):
            idx = perm[start : start + config.minibatch_size]
            mb_targets = None
            if targets is not None:
                mb_targets = IntuitionTargets(
                    actions=targets.actions[idx],
                    weights=targets.weights[idx],
                    config_indices=targets.config_indices[idx],
                )
            metrics, grads = minibatch_loss_grads(
                params, feats[idx], buffer.actions[idx], buffer.logprobs[idx],
                adv[idx], buffer.returns[idx], config, mb_targets,
            )
            if first_ratio_err is None:
                first_ratio_err = metrics["max_ratio_err"]
            grads, grad_norm = nn.clip_grad_norm(grads, config.max_grad_norm)
            params, adam_state = nn.adam_step(params, grads, adam_state, config.lr)
            metrics["grad_norm"] = grad_norm
            for k, v in metrics.items():
                accum[k] = accum.get(k, 0.0) + v
            n_batches += 1
    nn.check_finite(params)

    out = {k: v / n_batches for k, v in accum.items()}
    # Reported total satisfies the additivity contract exactly.
    out["loss_total"] = (
        out["loss_policy"] + config.value_coef * out["loss_value"] + out["loss_entropy"]
        + (config.intuition_coef * out["loss_intuition"] if targets is not None else 0.0)
    )
    out["adv_mean_abs"] = float(np.abs(adv.mean()))
    out["adv_std"] = float(adv.std())
    out["first_batch_max_ratio_err"] = float(first_ratio_err)
    if targets is not None:
        out["agreement_rate"] = float((mismatch_vector(buffer.actions, targets) == 1).mean())
    return params, adam_state, out


def evaluate(params: nn.ActorCriticParams, env_name: str, episodes: int = 100, seed=0):
    """Mean and std of episode returns under greedy argmax actions, over
    fresh episodes with distinct derived seeds."""
    spec = envs.get_spec(env_name)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    children = ss.spawn(episodes)
    pool = [envs.ENVS[env_name]() for _ in range(episodes)]
    obs = [e.reset(seed=c) for e, c in zip(pool, children)]
    returns = np.zeros(episodes)
    active = list(range(episodes))
    while active:
        feats = envs.featurize(spec, np.stack([obs[i] for i in active]))
        logits = nn.policy_logits(params, feats)
        chosen = np.argmax(logits, axis=1)
        still = []
        for i, action in zip(active, chosen):
            result = pool[i].step(int(action))
            returns[i] += result.reward
            if result.terminated or result.truncated:
                continue
            obs[i] = result.obs
            still.append(i)
        active = still
    return float(returns.mean()), float(returns.std())


def train(env_name: str, config: PPOConfig, total_steps: int, net=None,
          solve_threshold: float | None = None, eval_episodes: int = 100):
    """Alternate rollout collection, GAE, and PPO updates until the step
    budget is exhausted or the evaluation mean reaches solve_threshold.
    Returns (params, RunReport)."""
    config.validate()
    spec = envs.get_spec(env_name)
    encoder = None
    if config.intuition_enabled:
        if net is None:
            raise ConfigError("intuition is enabled but no net was given")
        if net.env_name != env_name:
            raise ConfigError(
                f"net '{net.name}' targets environment '{net.env_name}', not '{env_name}'"
            )
        encoder = get_encoder(env_name)

    root = np.random.SeedSequence(config.seed)
    init_ss, env_ss, sample_ss, shuffle_ss, target_ss, eval_ss = root.spawn(6)
    params = nn.init_params(spec.obs_dim, spec.n_actions, np.random.default_rng(init_ss))
    adam_state = nn.adam_init(params)
    sample_rng = np.random.default_rng(sample_ss)
    shuffle_rng = np.random.default_rng(shuffle_ss)
    target_rng = np.random.default_rng(target_ss)
    eval_seed = int(np.random.default_rng(eval_ss).integers(2**63))

    env = envs.ENVS[env_name]()
    obs = env.reset(seed=env_ss)

    t_start = time.perf_counter()
    target_time = 0.0
    target_samples = 0
    steps = 0
    curve = []
    steps_to_solve = None
    final_std = None
    while steps + config.n_steps <= total_steps:
        buffer = collect_rollout(env, params, config.n_steps, sample_rng, obs)
        obs = buffer.final_obs
        compute_gae(buffer, config.gamma, config.gae_lambda)

        targets = None
        if config.intuition_enabled:
            t0 = time.perf_counter()
            targets = compute_targets(
                net, encoder, buffer.obs, mode=config.target_mode, rng=target_rng
            )
            target_time += time.perf_counter() - t0
            target_samples += config.n_steps

        params, adam_state, metrics = ppo_update(
            params, adam_state, buffer, config, shuffle_rng, targets
        )
        steps += config.n_steps

        mean, final_std = evaluate(params, env_name, eval_episodes, eval_seed)
        curve.append(CurvePoint(
            step=steps,
            mean_eval_reward=mean,
            loss_policy=metrics["loss_policy"],
            loss_value=metrics["loss_value"],
            loss_entropy=metrics["loss_entropy"],
            loss_intuition=metrics["loss_intuition"],
            agreement_rate=metrics.get("agreement_rate"),
        ))
        if solve_threshold is not None and mean >= solve_threshold:
            steps_to_solve = steps
            break

    report = RunReport(
        env_name=env_name,
        seed=config.seed,
        config=asdict(config),
        net_hash=net.source_hash if net is not None else None,
        steps_to_solve=steps_to_solve,
        total_steps=steps,
        wall_clock_seconds=time.perf_counter() - t_start,
        overhead_us_per_sample=(
            1e6 * target_time / target_samples if target_samples else None
        ),
        curve=curve,
        final_eval_mean=curve[-1].mean_eval_reward if curve else None,
        final_eval_std=final_std,
    )
    return params, report
