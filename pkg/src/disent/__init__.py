"""Disentanglement phase diagrams of two-qubit X states under local noise."""

from .channels import ChannelKind, ChannelSpec, DecaySchedule, apply_joint, evolve_o, evolve_x
from .concurrence import MatrixType, classify, concurrence_x, q_phi, q_psi, wootters
from .critical import CriticalSet, PhaseLabel, SliceParams, classify_point, critical_set
from .density import DensityMatrix4, OState, XState, decompose, make_density, recompose

__version__ = "0.1.0"

__all__ = [
    "ChannelKind", "ChannelSpec", "DecaySchedule", "apply_joint", "evolve_o", "evolve_x",
    "MatrixType", "classify", "concurrence_x", "q_phi", "q_psi", "wootters",
    "CriticalSet", "PhaseLabel", "SliceParams", "classify_point", "critical_set",
    "DensityMatrix4", "OState", "XState", "decompose", "make_density", "recompose",
]
