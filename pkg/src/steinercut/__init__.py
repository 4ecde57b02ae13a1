"""Steiner mincut index and dual edge sensitivity oracle."""

from .carcass import Carcass, build_carcass
from .gen import gen_hard_instance, gen_random, recover_adjacency
from .graph import Cut, MultiGraph, capacity, classify_cut, contract, surgery
from .minplus1 import MinPlusOneIndex, build_index
from .reference import (
    CutFamily,
    connectivity_classes,
    enumerate_cuts,
    max_flow_mincut,
    min_steiner_cut_separating,
    steiner_mincut,
    tight_cut,
)
from .sensitivity import DualOracle, build_dual_oracle
from .verify import measure, verify

__all__ = [
    "MultiGraph",
    "Cut",
    "capacity",
    "classify_cut",
    "surgery",
    "contract",
    "CutFamily",
    "max_flow_mincut",
    "steiner_mincut",
    "min_steiner_cut_separating",
    "enumerate_cuts",
    "connectivity_classes",
    "tight_cut",
    "Carcass",
    "build_carcass",
    "MinPlusOneIndex",
    "build_index",
    "DualOracle",
    "build_dual_oracle",
    "gen_random",
    "gen_hard_instance",
    "recover_adjacency",
    "verify",
    "measure",
]

__version__ = "0.1.0"
