"""Intuition nets: declarative Bayes nets, abstract-state encoders, and the
hinge loss that pushes policy logits toward the intuitive action."""

from .model import (
    IntuitionNet,
    IntuitionNode,
    MarginalChoice,
    infer_action_posterior,
    intuitive_action,
    marginal,
)
from .parser import NetParseError, load_net, parse_net
from .encoders import (
    BatchEncoder,
    encode_cartpole,
    encode_lander,
    encode_mountaincar,
    encode_taxi,
    get_encoder,
)
from .loss import (
    IntuitionTargets,
    compute_targets,
    intuition_loss,
    intuition_loss_grad,
    joint_posteriors,
    mismatch_vector,
)

__all__ = [
    "IntuitionNet", "IntuitionNode", "MarginalChoice", "infer_action_posterior",
    "intuitive_action", "marginal", "NetParseError", "load_net", "parse_net",
    "BatchEncoder", "encode_cartpole", "encode_lander", "encode_mountaincar",
    "encode_taxi", "get_encoder", "IntuitionTargets", "compute_targets",
    "intuition_loss", "intuition_loss_grad", "joint_posteriors", "mismatch_vector",
]
