"""Differentially private stochastic linear bandits and a regret simulator."""

from .environment import BanditInstance, NoiseModel, RegretTrace, generate_instance
from .geometry import Action, ActionSet, DesignResult, NetParams, build_zeta_net, frank_wolfe_design

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActionSet",
    "BanditInstance",
    "DesignResult",
    "NetParams",
    "NoiseModel",
    "RegretTrace",
    "build_zeta_net",
    "frank_wolfe_design",
    "generate_instance",
]
