from simulator.core.bell import (
    binarized_probs,
    ch_ratio,
    optimize_psi,
    photon_cutoff_from_quadrature,
    s_versus_alpha,
    s_versus_sigma,
    sigma_cutoff,
)
from simulator.core.measurement import (
    apply_loss_quadrature,
    exact_joint_distribution,
    quadrature_joint_density,
    spin_joint_distribution,
)
from simulator.core.sources import ExactSource, QuadratureSource, SpinSource
from simulator.core.states import pair_coherent_coeffs, pair_coherent_state, spin_schmidt

__all__ = [
    "binarized_probs",
    "ch_ratio",
    "optimize_psi",
    "photon_cutoff_from_quadrature",
    "s_versus_alpha",
    "s_versus_sigma",
    "sigma_cutoff",
    "apply_loss_quadrature",
    "exact_joint_distribution",
    "quadrature_joint_density",
    "spin_joint_distribution",
    "ExactSource",
    "QuadratureSource",
    "SpinSource",
    "pair_coherent_coeffs",
    "pair_coherent_state",
    "spin_schmidt",
]
