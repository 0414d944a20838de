"""Numerical linear symplectic geometry: symplectic matrices, eggs and their
sections, the action integral, Hamiltonian flows, and phase-space uncertainty."""

from ._accel import HAS_NUMBA
from .core import (
    PlaneSpec,
    hermitian_eigenvalues,
    matrix_exponential,
    orthonormalize_plane,
    standard_symplectic_matrix,
)
from .dynamics import (
    QuadraticHamiltonian,
    ScalarPotentialSystem,
    integrate_flow,
    is_canonical,
    linear_flow,
    oscillator_ground_energy,
    shadow_history,
    symplectic_polar,
)
from .ellipsoid import (
    CenteredEllipsoid,
    conjugate_section_areas,
    egg,
    image_shadow_area,
    section_area,
    shadow_area,
    squeeze_check,
)
from .loops import Loop, poincare_invariant, section_boundary_loop, transform_loop
from .quantum import (
    CovarianceMatrix,
    covariance_ellipsoid,
    is_quantum_blob,
    minor_check,
    quantum_condition,
    rs_check,
    saturation_report,
    transform_covariance,
    uncertainty_report,
)
from .symplectic import (
    SymplecticMatrix,
    block_conditions_report,
    compose,
    is_symplectic,
    is_symplectic_plane,
    random_symplectic,
    symplectic_inverse,
)

__version__ = "0.1.0"
