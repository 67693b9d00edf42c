"""Entanglement evolution of bipartite states under local channels."""

from .channels import KrausChannel, channel_image, make_channel
from .concurrence import (
    ConcurrenceMatrix,
    concurrence_matrix,
    convex_roof_estimate,
    iconcurrence_pure,
    wootters_concurrence,
)
from .evolution import EvolutionReport, run_suite
from .states import Decomposition, DensityMatrix, PureState, max_entangled

__all__ = [
    "ConcurrenceMatrix",
    "Decomposition",
    "DensityMatrix",
    "EvolutionReport",
    "KrausChannel",
    "PureState",
    "channel_image",
    "concurrence_matrix",
    "convex_roof_estimate",
    "iconcurrence_pure",
    "make_channel",
    "max_entangled",
    "run_suite",
    "wootters_concurrence",
]
