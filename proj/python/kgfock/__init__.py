"""Lattice-truncated Fock-space toolkit for the charged P(phi)_2 model."""

from ._kgfock import (
    ContractError,
    FockBasis,
    HamiltonianBundle,
    IllConditionedError,
    InteractionSpec,
    KgfockError,
    MomentumLattice,
    ParameterError,
    Potential,
    ResourceError,
    ShapeError,
    SolverError,
    StabilityError,
    UnstableConfigurationError,
    assemble,
    b_matrix,
    enumerate_basis,
    gaussian_potential,
    ground_state,
    heisenberg_probe,
    hvz_gap_probe,
    interaction_spec,
    lambda_quant,
    lattice,
    lorentzian_potential,
    make_potential,
    omega_block,
    pair_kernel,
    pair_kernel_bound,
    potential_matrix,
    quantize,
    sampled_potential,
    weyl_quantize,
    zero_potential,
)

__version__ = "0.1.0"
