"""Covariance matrices and the uncertainty principle in phase space.

Tolerances are dimensionless: quantities with units of ``hbar^2`` (RS
residuals, conjugate minors) are compared against ``tol * hbar^2``, and
eigenvalues and symplectic eigenvalues against ``tol * hbar``.  With the
default ``hbar = 1`` this is the plain absolute tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import as_square, dof, hermitian_eigenvalues, max_abs, standard_symplectic_matrix
from .ellipsoid import CenteredEllipsoid, conjugate_section_areas, symplectic_eigenvalues
from .symplectic import SymplecticMatrix

DEFAULT_TOL = 1e-9


class SingularCovarianceError(ValueError):
    def __init__(self, direction):
        self.direction = np.asarray(direction)
        super().__init__(f"covariance matrix is singular along {np.round(self.direction, 12).tolist()}")


@dataclass(frozen=True)
class CovarianceMatrix:
    """``Sigma = [[D(x,x), D(x,p)], [D(p,x), D(p,p)]]``."""

    sigma: np.ndarray

    def __post_init__(self):
        s = as_square(self.sigma, "covariance matrix").copy()
        dof(s)
        if max_abs(s - s.T) > 1e-12 * max(1.0, max_abs(s)):
            raise ValueError("covariance matrix is not symmetric")
        if np.any(np.diag(s) < 0):
            raise ValueError("covariance matrix has a negative variance")
        s = 0.5 * (s + s.T)
        s.flags.writeable = False
        object.__setattr__(self, "sigma", s)

    @property
    def n(self) -> int:
        return self.sigma.shape[0] // 2

    @property
    def var_x(self) -> np.ndarray:
        return np.diag(self.sigma)[: self.n]

    @property
    def var_p(self) -> np.ndarray:
        return np.diag(self.sigma)[self.n :]

    @property
    def cov_xp(self) -> np.ndarray:
        """``Delta(x_j, p_j)`` for each mode."""
        n = self.n
        return self.sigma[np.arange(n), n + np.arange(n)]


def _cov(sigma) -> CovarianceMatrix:
    return sigma if isinstance(sigma, CovarianceMatrix) else CovarianceMatrix(sigma)


def _check_hbar(hbar):
    if not hbar > 0:
        raise ValueError("hbar must be positive")


def gaussian_covariance(S, spectrum) -> CovarianceMatrix:
    """``S diag(d, d) S^T`` for symplectic eigenvalues ``d``."""
    d = np.asarray(spectrum, dtype=float)
    M = np.asarray(S, dtype=float)
    return CovarianceMatrix(M @ np.diag(np.concatenate([d, d])) @ M.T)


def rs_residuals(sigma, hbar: float = 1.0) -> np.ndarray:
    """``r_j = Dp_j^2 Dx_j^2 - D(x_j,p_j)^2 - hbar^2/4``."""
    c = _cov(sigma)
    return c.var_x * c.var_p - c.cov_xp**2 - 0.25 * hbar**2


@dataclass(frozen=True)
class RSCheck:
    residuals: np.ndarray
    holds: bool


def rs_check(sigma, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> RSCheck:
    _check_hbar(hbar)
    r = rs_residuals(sigma, hbar)
    return RSCheck(r, bool(np.all(r >= -tol * hbar**2)))


def heisenberg_residuals(sigma, hbar: float = 1.0) -> np.ndarray:
    """``Dp_j Dx_j - hbar/2``."""
    c = _cov(sigma)
    return np.sqrt(c.var_x * c.var_p) - 0.5 * hbar


@dataclass(frozen=True)
class QuantumCondition:
    min_eigenvalue: float
    valid: bool


def quantum_condition(sigma, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> QuantumCondition:
    """Positivity of the Hermitian matrix ``Sigma + (i hbar / 2) J``."""
    _check_hbar(hbar)
    c = _cov(sigma)
    lam = hermitian_eigenvalues(c.sigma, 0.5 * hbar * standard_symplectic_matrix(c.n))
    return QuantumCondition(float(lam[0]), bool(lam[0] >= -tol * hbar))


@dataclass(frozen=True)
class MinorCheck:
    minors: np.ndarray
    holds: bool


def minor_check(sigma, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> MinorCheck:
    """Order-2 principal minors of ``Sigma + (i hbar/2) J`` on each conjugate pair ``(j, n+j)``."""
    _check_hbar(hbar)
    c = _cov(sigma)
    n, s = c.n, c.sigma
    minors = np.empty(n)
    for j in range(n):
        a = complex(s[j, j])
        b = s[j, n + j] + 0.5j * hbar
        cc = s[n + j, j] - 0.5j * hbar
        d = complex(s[n + j, n + j])
        minors[j] = (a * d - b * cc).real
    return MinorCheck(minors, bool(np.all(minors >= -tol * hbar**2)))


def covariance_ellipsoid(sigma) -> CenteredEllipsoid:
    """``{z : z^T Sigma^{-1} z / 2 <= 1}`` as an ellipsoid with shape ``2 Sigma`` and radius 1."""
    c = _cov(sigma)
    w, V = np.linalg.eigh(c.sigma)
    if w[0] <= 1e-14 * max(1.0, w[-1]):
        raise SingularCovarianceError(V[:, 0])
    return CenteredEllipsoid(2.0 * c.sigma, 1.0)


def symplectic_spectrum(sigma) -> np.ndarray:
    """Ascending ``lambda_j > 0`` with ``+-i lambda_j`` the eigenvalues of ``J Sigma``."""
    c = _cov(sigma)
    w, V = np.linalg.eigh(c.sigma)
    if w[0] <= 1e-14 * max(1.0, w[-1]):
        raise SingularCovarianceError(V[:, 0])
    return symplectic_eigenvalues(c.sigma)


@dataclass(frozen=True)
class BlobVerdict:
    blob: bool
    spectrum: np.ndarray


def is_quantum_blob(sigma, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> BlobVerdict:
    """Whether ``Sigma = (hbar/2) S S^T`` for some symplectic ``S``, i.e. every symplectic
    eigenvalue equals ``hbar/2``."""
    _check_hbar(hbar)
    spec = symplectic_spectrum(sigma)
    return BlobVerdict(bool(np.all(np.abs(spec - 0.5 * hbar) <= tol * hbar)), spec)


@dataclass(frozen=True)
class SaturationReport:
    residuals: np.ndarray
    saturated: list
    blob: bool
    spectrum: np.ndarray

    @property
    def all_saturated(self) -> bool:
        return all(self.saturated)

    @property
    def full_saturation(self) -> bool:
        return self.all_saturated and self.blob

    @property
    def discrepancy(self) -> str | None:
        """Non-``None`` when per-mode saturation and the blob test disagree."""
        if self.all_saturated == self.blob:
            return None
        if self.blob:
            return "quantum blob with unsaturated modes " + str([j for j, s in enumerate(self.saturated) if not s])
        return "all modes saturated but symplectic spectrum differs from hbar/2"


def saturation_report(sigma, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> SaturationReport:
    r = rs_residuals(sigma, hbar)
    b = is_quantum_blob(sigma, hbar, tol)
    return SaturationReport(r, [bool(abs(rj) <= tol * hbar**2) for rj in r], b.blob, b.spectrum)


def transform_covariance(S, sigma) -> CovarianceMatrix:
    """Covariance in the coordinates ``z' = S z``: ``S Sigma S^T``."""
    c = _cov(sigma)
    M = S.matrix if isinstance(S, SymplecticMatrix) else as_square(S)
    if M.shape != c.sigma.shape:
        raise ValueError(f"matrix of shape {M.shape} does not match covariance of shape {c.sigma.shape}")
    return CovarianceMatrix(M @ c.sigma @ M.T)


@dataclass(frozen=True)
class UncertaintyReport:
    """Diagnostics of one covariance matrix.  Verdicts derive from the stored numbers."""

    hbar: float
    tol: float
    rs_residuals: np.ndarray
    heisenberg_residuals: np.ndarray
    min_eigenvalue: float
    section_areas: list | None  # None when Sigma is singular or indefinite
    spectrum: np.ndarray | None

    @property
    def quantum_valid(self) -> bool:
        return self.min_eigenvalue >= -self.tol * self.hbar

    @property
    def rs_all(self) -> bool:
        return bool(np.all(self.rs_residuals >= -self.tol * self.hbar**2))

    @property
    def saturated_modes(self) -> list:
        return [j for j, r in enumerate(self.rs_residuals) if abs(r) <= self.tol * self.hbar**2]

    @property
    def blob(self) -> bool:
        if self.spectrum is None:
            return False
        return bool(np.all(np.abs(self.spectrum - 0.5 * self.hbar) <= self.tol * self.hbar))


def uncertainty_report(sigma, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> UncertaintyReport:
    _check_hbar(hbar)
    c = _cov(sigma)
    qc = quantum_condition(c, hbar, tol)
    try:
        areas = [s.area for s in conjugate_section_areas(covariance_ellipsoid(c))]
        spectrum = symplectic_spectrum(c)
    except (SingularCovarianceError, ValueError):
        areas, spectrum = None, None
    return UncertaintyReport(
        hbar=hbar,
        tol=tol,
        rs_residuals=rs_residuals(c, hbar),
        heisenberg_residuals=heisenberg_residuals(c, hbar),
        min_eigenvalue=qc.min_eigenvalue,
        section_areas=areas,
        spectrum=spectrum,
    )
