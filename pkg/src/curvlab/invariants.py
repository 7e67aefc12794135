"""The ten quadratic symmetric-2-form curvature invariants and the
identity residual.

In the fixed ordering used throughout the package::

    phi1 = |R|^2 g        phi2 = |rho|^2 g      phi3 = tau^2 g
    phi4 = Rcheck         phi5 = rhocheck       phi6 = L rho
    phi7 = tau rho        phi8 = (lap tau) g    phi9 = Hess tau
    phi10 = rough Laplacian of rho

with Rcheck_ij = R_abci R^abc_j, rhocheck_ij = rho_ai rho^a_j and
(L rho)_ij = 2 R_iabj rho^ab.  All formulas are plain contractions, so they
evaluate verbatim in any dimension; only the vanishing of the universal
combination is special to dimension 4.

The universal coefficient vector (lambda/4, -lambda, lambda/4, -lambda,
2 lambda, lambda, -lambda, 0, 0, 0) makes ``sum_i c_i phi_i`` vanish on
every 4-dimensional Riemannian manifold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import CurvaturePackage
from .tensors import ORTHONORMAL, Sym2Form, to_orthonormal_frame

__all__ = [
    "PHI_LABELS",
    "Coefficients",
    "InvariantVector",
    "phi_vector",
    "to_orthonormal",
    "low_degree_basis",
    "combine",
    "identity_residual",
    "residual_scale",
    "relative_residual",
    "gauss_bonnet_integrand",
]

PHI_LABELS = (
    "|R|^2 g",
    "|rho|^2 g",
    "tau^2 g",
    "Rcheck",
    "rhocheck",
    "L rho",
    "tau rho",
    "(lap tau) g",
    "Hess tau",
    "rough lap rho",
)

_UNIVERSAL = np.array([0.25, -1.0, 0.25, -1.0, 2.0, 1.0, -1.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True)
class Coefficients:
    """A candidate coefficient vector (c1..c10) with its overall scale."""

    c: np.ndarray
    lam: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        if c.shape != (10,):
            raise ValueError("expected 10 coefficients")
        object.__setattr__(self, "c", c)

    @classmethod
    def universal(cls, lam: float = 1.0) -> "Coefficients":
        return cls(lam * _UNIVERSAL, lam)


@dataclass(frozen=True)
class InvariantVector:
    """phi1..phi10 at one point, all in the same frame."""

    phi: tuple
    frame: str
    case: str = ""
    point: np.ndarray | None = None

    def __post_init__(self):
        phi = tuple(self.phi)
        object.__setattr__(self, "phi", phi)
        if len(phi) != 10:
            raise ValueError("expected 10 invariants")
        if any(p.dim != phi[0].dim or p.frame != self.frame for p in phi):
            raise ValueError("invariants must share dim and frame")


def phi_vector(pkg: CurvaturePackage, case: str = "") -> InvariantVector:
    """Evaluate all ten invariants in the frame the package is expressed in."""
    g = pkg.g
    gi = pkg.g_inv
    r = pkg.riemann.entries
    rho = pkg.ricci.entries
    tau = pkg.tau

    r_up3 = np.einsum("ai,bj,ck,abcl->ijkl", gi, gi, gi, r)
    r_up4 = np.einsum("ijkd,dl->ijkl", r_up3, gi)
    norm_r2 = float(np.einsum("ijkl,ijkl->", r_up4, r))
    rho_up = gi @ rho @ gi
    norm_rho2 = float((rho_up * rho).sum())

    phi1 = norm_r2 * g
    phi2 = norm_rho2 * g
    phi3 = tau * tau * g
    phi4 = np.einsum("abci,abcj->ij", r_up3, r)
    phi5 = rho @ gi @ rho
    phi6 = 2.0 * np.einsum("iabj,ab->ij", r, rho_up)
    phi7 = tau * rho
    phi8 = pkg.lap_tau * g
    phi9 = pkg.hess_tau.entries
    phi10 = pkg.rough_lap_ricci.entries

    forms = tuple(
        Sym2Form(pkg.dim, m, frame=pkg.frame)
        for m in (phi1, phi2, phi3, phi4, phi5, phi6, phi7, phi8, phi9, phi10)
    )
    return InvariantVector(forms, pkg.frame, case=case, point=pkg.point)


def to_orthonormal(iv: InvariantVector, g_value: np.ndarray) -> InvariantVector:
    """Re-express every invariant against the Cholesky orthonormal frame."""
    if iv.frame == ORTHONORMAL:
        return iv
    forms = tuple(to_orthonormal_frame(g_value, p) for p in iv.phi)
    return InvariantVector(forms, ORTHONORMAL, case=iv.case, point=iv.point)


def low_degree_basis(pkg: CurvaturePackage):
    """The 2-form bases of derivative degree 0 and 2: g, tau*g, and rho."""
    g = Sym2Form(pkg.dim, pkg.g, frame=pkg.frame)
    tau_g = Sym2Form(pkg.dim, pkg.tau * pkg.g, frame=pkg.frame)
    return g, tau_g, pkg.ricci


def combine(iv: InvariantVector, coeffs: Coefficients) -> Sym2Form:
    """The 2-form sum_i c_i phi_i."""
    total = sum(c * p.entries for c, p in zip(coeffs.c, iv.phi))
    return Sym2Form(iv.phi[0].dim, total, frame=iv.frame)


def identity_residual(pkg: CurvaturePackage, coeffs: Coefficients) -> Sym2Form:
    """sum_i c_i phi_i at one point; zero (to rounding) for the universal
    coefficients on any 4-dimensional metric."""
    return combine(phi_vector(pkg), coeffs)


def residual_scale(iv: InvariantVector) -> float:
    """Reference magnitude: the largest invariant entry at this point."""
    return max(float(np.max(np.abs(p.entries))) for p in iv.phi)


def relative_residual(pkg: CurvaturePackage, coeffs: Coefficients) -> float:
    """max |sum c_i phi_i| divided by the largest invariant entry."""
    iv = phi_vector(pkg)
    scale = residual_scale(iv)
    res = float(np.max(np.abs(combine(iv, coeffs).entries)))
    if scale == 0.0:
        return 0.0 if res == 0.0 else float("inf")
    return res / scale


def gauss_bonnet_integrand(pkg: CurvaturePackage) -> float:
    """Pointwise integrand tau^2 - 4 |rho|^2 + |R|^2 (no integration here)."""
    from .tensors import Tensor, norm_sq

    norm_r2 = norm_sq(pkg.g, pkg.g_inv, pkg.riemann)
    rho_t = Tensor(pkg.dim, ("l", "l"), pkg.ricci.entries)
    norm_rho2 = norm_sq(pkg.g, pkg.g_inv, rho_t)
    return pkg.tau**2 - 4.0 * norm_rho2 + norm_r2
