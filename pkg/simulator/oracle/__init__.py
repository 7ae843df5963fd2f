"""Slow independent validators for the production distribution builders."""

from simulator.oracle.dense import dense_state_and_measure
from simulator.oracle.monte_carlo import MonteCarloEstimate, mc_sample
from simulator.oracle.symbolic import symbolic_spin_expand

__all__ = ["dense_state_and_measure", "MonteCarloEstimate", "mc_sample", "symbolic_spin_expand"]
