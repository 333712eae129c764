"""Per-environment defaults: intuition-loss coefficients, step budgets,
shipped net files, solve thresholds."""

from importlib import resources

DEFAULT_INTUITION_COEF = {
    "cartpole": 0.5,
    "mountaincar": 1.0,
    "lander": 0.5,
    "taxi": 0.5,
}

DEFAULT_BUDGET = {
    "cartpole": 200_000,
    "mountaincar": 600_000,
    "lander": 400_000,
    "taxi": 1_500_000,
}

DEFAULT_NET = {
    "cartpole": "cartpole",
    "mountaincar": "mountaincar",
    "lander": "lander_basic",
    "taxi": "taxi",
}

# BBR environments have no fixed solve threshold; taxi prefers 8.1 when the
# baseline reaches it.
PREFERRED_BBR_THRESHOLD = {
    "taxi": 8.1,
}

EVAL_EPISODES = 100


def shipped_net_path(name: str):
    """Filesystem path of a shipped net config (without the .net suffix)."""
    return resources.files("shire") / "configs" / f"{name}.net"
