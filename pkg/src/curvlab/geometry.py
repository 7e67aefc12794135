"""Curvature engine for coordinate charts and left-invariant metrics.

Conventions, pinned by the catalog golden tables:

* curvature operator  R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
  - nabla_[X,Y] Z, with components R_ijkl = g(R(d_i, d_j) d_k, d_l);
* the sectional curvature of the (e_i, e_j) plane in an orthonormal frame
  is R_ijji (so R_ijij = -K);
* Ricci contraction rho_ij = g^ab R_iabj, which makes a space of constant
  curvature a satisfy rho = (dim-1) a g;
* the Laplacian is div grad (no minus sign): lap f = g^ij Hess f_ij.

Three independent routes produce a :class:`CurvaturePackage`:

* ``curvature_package`` differentiates a metric patch with exact jet
  arithmetic;
* ``lie_group_package`` computes algebraically from structure constants
  through the Koszul formula;
* ``finite_difference_package`` estimates the metric derivatives with
  Richardson-extrapolated central differences and assembles the curvature
  with plain numpy chain-rule formulas, sharing no code with the jet path.
  It exists as a cross-check oracle for the other two.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError
from .jets import Jet, jet_partial, jet_truncate
from .tensors import COORDINATE, LOWER, ORTHONORMAL, Sym2Form, Tensor

__all__ = [
    "CurvaturePackage",
    "StructureConstants",
    "christoffel",
    "riemann",
    "ricci_tau",
    "scalar_derivatives",
    "rough_laplacian_ricci",
    "curvature_package",
    "lie_group_package",
    "finite_difference_package",
]


@dataclass(frozen=True)
class CurvaturePackage:
    """All pointwise curvature data of one metric at one point."""

    dim: int
    point: np.ndarray | None
    g: np.ndarray
    g_inv: np.ndarray
    riemann: Tensor
    ricci: Sym2Form
    tau: float
    grad_tau: np.ndarray
    hess_tau: Sym2Form
    lap_tau: float
    rough_lap_ricci: Sym2Form
    frame: str = COORDINATE


@dataclass(frozen=True)
class StructureConstants:
    """Lie bracket coefficients c[k, i, j] = <[e_i, e_j], e^k> plus the
    inner product on the frame (identity by default)."""

    dim: int
    c: np.ndarray
    inner_product: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        q = np.asarray(self.inner_product, dtype=float)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "inner_product", q)
        d = self.dim
        if c.shape != (d, d, d):
            raise ValueError(f"structure constants must have shape ({d},{d},{d})")
        if q.shape != (d, d) or not np.allclose(q, q.T):
            raise ValueError("inner product must be a symmetric matrix")
        if np.max(np.abs(c + np.swapaxes(c, 1, 2))) > 1e-12:
            raise ValueError("structure constants must be antisymmetric in (i, j)")
        # Jacobi: sum over cyclic (i,j,k) of [[e_i,e_j],e_k] must vanish
        jac = np.einsum("mij,lmk->lijk", c, c)
        jac = jac + np.einsum("mjk,lmi->lijk", c, c) + np.einsum("mki,lmj->lijk", c, c)
        if np.max(np.abs(jac)) > 1e-12:
            raise ValueError("Jacobi identity violated")


# ---------------------------------------------------------------------------
# jet path


def _as_jet_matrix(metric_jets) -> np.ndarray:
    gj = np.asarray(metric_jets, dtype=object)
    if gj.ndim != 2 or gj.shape[0] != gj.shape[1]:
        raise ValueError("metric jets must form a square matrix")
    first = gj[0, 0]
    if not isinstance(first, Jet):
        raise ValueError("metric entries must be jets")
    for e in gj.reshape(-1):
        if not isinstance(e, Jet) or e.dim != first.dim or e.order != first.order:
            raise ValueError("metric jets must share dim and order")
    if gj.shape[0] != first.dim:
        raise ValueError("metric matrix size must equal the jet dimension")
    return gj


def _values(mat: np.ndarray) -> np.ndarray:
    out = np.empty(mat.shape)
    for idx in np.ndindex(mat.shape):
        out[idx] = mat[idx].value
    return out


def _spd_or_raise(g: np.ndarray, context: str) -> None:
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"metric is not positive definite {context}") from exc


def _truncate_all(mat: np.ndarray, order: int) -> np.ndarray:
    out = np.empty(mat.shape, dtype=object)
    for idx in np.ndindex(mat.shape):
        out[idx] = jet_truncate(mat[idx], order)
    return out


def _invert_jet_matrix(gj: np.ndarray) -> np.ndarray:
    """Matrix inverse over the jet ring by Gauss-Jordan elimination with
    partial pivoting on the value parts."""
    d = gj.shape[0]
    a = np.empty((d, d), dtype=object)
    a[:] = gj
    first = gj[0, 0]
    from .jets import jet_constant, jet_invert, jet_mul  # local to avoid clutter

    inv = np.empty((d, d), dtype=object)
    zero = jet_constant(0.0, first.dim, first.order)
    one = jet_constant(1.0, first.dim, first.order)
    for i in range(d):
        for j in range(d):
            inv[i, j] = one if i == j else zero
    for col in range(d):
        pivot_row = max(range(col, d), key=lambda r: abs(a[r, col].value))
        if a[pivot_row, col].value == 0.0:
            raise GeometryError("metric value matrix is singular")
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            inv[[col, pivot_row]] = inv[[pivot_row, col]]
        pinv = jet_invert(a[col, col])
        for j in range(d):
            a[col, j] = jet_mul(a[col, j], pinv)
            inv[col, j] = jet_mul(inv[col, j], pinv)
        for r in range(d):
            if r == col:
                continue
            f = a[r, col]
            if np.all(f.coeffs == 0.0):
                continue
            for j in range(d):
                a[r, j] = a[r, j] - jet_mul(f, a[col, j])
                inv[r, j] = inv[r, j] - jet_mul(f, inv[col, j])
    return inv


def _gamma_stage(gj: np.ndarray):
    """Inverse metric (full order) and Christoffel symbols (order - 1)."""
    d = gj.shape[0]
    order = gj[0, 0].order
    gv = _values(gj)
    _spd_or_raise(gv, "at the base point")
    ginv = _invert_jet_matrix(gj)
    dg = np.empty((d, d, d), dtype=object)  # dg[k, i, j] = d_k g_ij
    for k in range(d):
        for i in range(d):
            for j in range(i, d):
                dg[k, i, j] = dg[k, j, i] = jet_partial(gj[i, j], k)
    ginv_t = _truncate_all(ginv, order - 1)
    gamma = np.empty((d, d, d), dtype=object)  # gamma[k, i, j] = Gamma^k_ij
    for i in range(d):
        for j in range(i, d):
            for k in range(d):
                acc = None
                for l in range(d):
                    w = dg[i, j, l] + dg[j, i, l] - dg[l, i, j]
                    term = ginv_t[k, l] * w
                    acc = term if acc is None else acc + term
                half = 0.5 * acc
                gamma[k, i, j] = gamma[k, j, i] = half
    return gv, ginv, gamma


def _riemann_stage(gj: np.ndarray, ginv: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    """All-lower curvature R_ijkl as jets, two orders below the metric."""
    d = gj.shape[0]
    order_r = gamma[0, 0, 0].order - 1
    dgamma = np.empty((d, d, d, d), dtype=object)  # dgamma[c, k, i, j]
    for c in range(d):
        for k in range(d):
            for i in range(d):
                for j in range(i, d):
                    dgamma[c, k, i, j] = dgamma[c, k, j, i] = jet_partial(gamma[k, i, j], c)
    gt = _truncate_all(gamma, order_r)
    g2 = _truncate_all(gj, order_r)
    riem = np.empty((d, d, d, d), dtype=object)
    zero = jet_truncate(gj[0, 0], order_r) * 0.0
    for i in range(d):
        for k in range(d):
            for l in range(d):
                riem[i, i, k, l] = zero
    for i, j in itertools.combinations(range(d), 2):
        for k in range(d):
            # R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik
            #           + Gamma^m_jk Gamma^l_im - Gamma^m_ik Gamma^l_jm
            upper = []
            for l in range(d):
                acc = dgamma[i, l, j, k] - dgamma[j, l, i, k]
                for m in range(d):
                    acc = acc + gt[m, j, k] * gt[l, i, m] - gt[m, i, k] * gt[l, j, m]
                upper.append(acc)
            for l in range(d):
                low = None
                for m in range(d):
                    term = g2[l, m] * upper[m]
                    low = term if low is None else low + term
                riem[i, j, k, l] = low
                riem[j, i, k, l] = -low
    return riem


def _ricci_stage(riem: np.ndarray, ginv_t: np.ndarray):
    """Ricci jets rho_ij = g^ab R_iabj and the scalar curvature jet."""
    d = riem.shape[0]
    rho = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(i, d):
            acc = None
            for a in range(d):
                for b in range(d):
                    term = ginv_t[a, b] * riem[i, a, b, j]
                    acc = term if acc is None else acc + term
            rho[i, j] = rho[j, i] = acc
    tau = None
    for i in range(d):
        for j in range(d):
            term = ginv_t[i, j] * rho[i, j]
            tau = term if tau is None else tau + term
    return rho, tau


def _scalar_stage(tau_jet: Jet, gamma: np.ndarray, ginv_v: np.ndarray):
    d = ginv_v.shape[0]
    dtau = [jet_partial(tau_jet, k) for k in range(d)]
    grad = np.array([t.value for t in dtau])
    gamma_v = _values(gamma)
    hess = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            val = jet_partial(dtau[i], j).value - gamma_v[:, i, j] @ grad
            hess[i, j] = hess[j, i] = val
    lap = float(np.einsum("ij,ij->", ginv_v, hess))
    return grad, hess, lap


def _rough_lap_stage(rho: np.ndarray, gamma: np.ndarray, ginv_v: np.ndarray) -> np.ndarray:
    d = rho.shape[0]
    gamma1 = _truncate_all(gamma, 1)
    rho1 = _truncate_all(rho, 1)
    # first covariant derivative T_aij = d_a rho_ij - G^m_ai rho_mj - G^m_aj rho_im
    t_jets = np.empty((d, d, d), dtype=object)
    for a in range(d):
        for i in range(d):
            for j in range(i, d):
                acc = jet_partial(rho[i, j], a)
                acc = jet_truncate(acc, 1)
                for m in range(d):
                    acc = acc - gamma1[m, a, i] * rho1[m, j] - gamma1[m, a, j] * rho1[i, m]
                t_jets[a, i, j] = t_jets[a, j, i] = acc
    t_val = np.empty((d, d, d))
    dt_val = np.empty((d, d, d, d))  # dt_val[b, a, i, j] = d_b T_aij
    unit = np.eye(d, dtype=int)
    for a in range(d):
        for i in range(d):
            for j in range(d):
                t_val[a, i, j] = t_jets[a, i, j].value
                for b in range(d):
                    dt_val[b, a, i, j] = t_jets[a, i, j].coefficient(unit[b])
    gamma_v = _values(gamma)
    s = dt_val
    s = s - np.einsum("mba,mij->baij", gamma_v, t_val)
    s = s - np.einsum("mbi,amj->baij", gamma_v, t_val)
    s = s - np.einsum("mbj,aim->baij", gamma_v, t_val)
    return np.einsum("ba,baij->ij", ginv_v, s)


def christoffel(metric_jets) -> Tensor:
    """Levi-Civita connection coefficients Gamma^k_ij as jets (order - 1)."""
    gj = _as_jet_matrix(metric_jets)
    if gj[0, 0].order < 1:
        raise ValueError("metric jets must have order >= 1")
    _, _, gamma = _gamma_stage(gj)
    return Tensor(gj.shape[0], ("u", "l", "l"), gamma)


def riemann(metric_jets) -> Tensor:
    """All-lower curvature tensor R_ijkl as jets (order - 2)."""
    gj = _as_jet_matrix(metric_jets)
    if gj[0, 0].order < 2:
        raise ValueError("metric jets must have order >= 2")
    _, ginv, gamma = _gamma_stage(gj)
    riem = _riemann_stage(gj, ginv, gamma)
    return Tensor(gj.shape[0], (LOWER,) * 4, riem)


def ricci_tau(riemann_tensor: Tensor, g_inv: np.ndarray):
    """Ricci form rho_ij = g^ab R_iabj and scalar curvature from a numeric
    all-lower curvature tensor."""
    r = riemann_tensor.entries
    gi = np.asarray(g_inv, dtype=float)
    rho = np.einsum("ab,iabj->ij", gi, r)
    tau = float(np.einsum("ij,ij->", gi, rho))
    return Sym2Form(riemann_tensor.dim, rho), tau


def scalar_derivatives(metric_jets):
    """Gradient, Hessian and Laplacian of the scalar curvature."""
    gj = _as_jet_matrix(metric_jets)
    if gj[0, 0].order < 4:
        raise ValueError("scalar curvature derivatives need metric jets of order 4")
    gv, ginv, gamma = _gamma_stage(gj)
    riem = _riemann_stage(gj, ginv, gamma)
    order_r = gj[0, 0].order - 2
    _, tau_jet = _ricci_stage(riem, _truncate_all(ginv, order_r))
    ginv_v = _values(ginv)
    grad, hess, lap = _scalar_stage(tau_jet, gamma, ginv_v)
    return grad, Sym2Form(gj.shape[0], hess), lap


def rough_laplacian_ricci(metric_jets) -> Sym2Form:
    """Trace of the second covariant derivative of the Ricci tensor."""
    gj = _as_jet_matrix(metric_jets)
    if gj[0, 0].order < 4:
        raise ValueError("the rough Laplacian needs metric jets of order 4")
    gv, ginv, gamma = _gamma_stage(gj)
    riem = _riemann_stage(gj, ginv, gamma)
    order_r = gj[0, 0].order - 2
    rho, _ = _ricci_stage(riem, _truncate_all(ginv, order_r))
    lap = _rough_lap_stage(rho, gamma, _values(ginv))
    return Sym2Form(gj.shape[0], lap)


def curvature_package(patch, point) -> CurvaturePackage:
    """Full curvature data of a metric patch at a point via jet arithmetic."""
    pt = np.asarray(point, dtype=float)
    gj = _as_jet_matrix(patch.jets_at(pt, order=4))
    d = gj.shape[0]
    gv, ginv, gamma = _gamma_stage(gj)
    ginv_v = _values(ginv)
    riem = _riemann_stage(gj, ginv, gamma)
    rho, tau_jet = _ricci_stage(riem, _truncate_all(ginv, 2))
    grad, hess, lap = _scalar_stage(tau_jet, gamma, ginv_v)
    rough = _rough_lap_stage(rho, gamma, ginv_v)
    return CurvaturePackage(
        dim=d,
        point=pt,
        g=gv,
        g_inv=ginv_v,
        riemann=Tensor(d, (LOWER,) * 4, _values(riem)),
        ricci=Sym2Form(d, _values(rho)),
        tau=tau_jet.value,
        grad_tau=grad,
        hess_tau=Sym2Form(d, hess),
        lap_tau=lap,
        rough_lap_ricci=Sym2Form(d, rough),
        frame=COORDINATE,
    )


# ---------------------------------------------------------------------------
# Lie-group path


def lie_group_package(sc: StructureConstants) -> CurvaturePackage:
    """Curvature of the left-invariant metric determined by structure
    constants, computed algebraically in the invariant frame.

    The connection comes from the Koszul formula
    2 <nabla_X Y, Z> = <[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>; the scalar
    curvature is constant so its derivatives vanish, but the Ricci tensor
    has nonzero covariant derivatives through the connection coefficients.
    """
    d = sc.dim
    c = sc.c
    q = sc.inner_product
    _spd_or_raise(q, "(frame inner product)")
    qinv = np.linalg.inv(q)
    cq = np.einsum("lij,lk->kij", c, q)  # cq[k,i,j] = <[e_i,e_j], e_k>
    # koszul[k,i,j] = <[e_i,e_j],e_k> - <[e_j,e_k],e_i> + <[e_k,e_i],e_j>
    koszul = cq - np.einsum("ijk->kij", cq) + np.einsum("ijk->jki", cq)
    gamma = 0.5 * np.einsum("mk,kij->mij", qinv, koszul)  # nabla_{e_i} e_j = G^m_ij e_m
    # constant frame fields: R^l_ijk = G^m_jk G^l_im - G^m_ik G^l_jm - c^m_ij G^l_mk
    ru = (
        np.einsum("mjk,lim->ijkl", gamma, gamma)
        - np.einsum("mik,ljm->ijkl", gamma, gamma)
        - np.einsum("mij,lmk->ijkl", c, gamma)
    )
    riem = np.einsum("lm,ijkm->ijkl", q, ru)
    rho = np.einsum("ab,iabj->ij", qinv, riem)
    tau = float(np.einsum("ij,ij->", qinv, rho))
    # nabla rho: frame components of rho are constant, so only connection terms
    p = -np.einsum("mai,mj->aij", gamma, rho) - np.einsum("maj,im->aij", gamma, rho)
    s = (
        -np.einsum("mba,mij->baij", gamma, p)
        - np.einsum("mbi,amj->baij", gamma, p)
        - np.einsum("mbj,aim->baij", gamma, p)
    )
    rough = np.einsum("ba,baij->ij", qinv, s)
    frame = ORTHONORMAL if np.allclose(q, np.eye(d)) else COORDINATE
    return CurvaturePackage(
        dim=d,
        point=None,
        g=q.copy(),
        g_inv=qinv,
        riemann=Tensor(d, (LOWER,) * 4, riem),
        ricci=Sym2Form(d, rho, frame=frame),
        tau=tau,
        grad_tau=np.zeros(d),
        hess_tau=Sym2Form(d, np.zeros((d, d)), frame=frame),
        lap_tau=0.0,
        rough_lap_ricci=Sym2Form(d, rough, frame=frame),
        frame=frame,
    )


# ---------------------------------------------------------------------------
# finite-difference path (cross-check oracle)


def _central_diff(f, x: np.ndarray, axes: tuple, h: float) -> np.ndarray:
    if not axes:
        return f(x)
    k, rest = axes[0], axes[1:]
    xp = x.copy()
    xp[k] += h
    xm = x.copy()
    xm[k] -= h
    return (_central_diff(f, xp, rest, h) - _central_diff(f, xm, rest, h)) / (2.0 * h)


# fine-step scale relative to the h parameter.  Two opposing error floors
# meet near this value at h = 1e-2: rounding noise grows like (step)^-4 for
# fourth derivatives, truncation like (step)^4; 0.8 h keeps both under the
# oracle tolerance for the catalog metrics.
_FINE_STEP = 0.8


def _richardson(f, x: np.ndarray, axes: tuple, h: float) -> np.ndarray:
    # composed central differences have error c s^2 + O(s^4); steps s and
    # 3s cancel the s^2 term.  s is the fine step: refining further would
    # drown fourth derivatives in cancellation noise.
    s = _FINE_STEP * h
    fine = _central_diff(f, x, axes, s)
    coarse = _central_diff(f, x, axes, 3.0 * s)
    return (9.0 * fine - coarse) / 8.0


def _derivative_tables(f, x: np.ndarray, dim: int, h: float):
    """g and its partial derivatives up to fourth order, as symmetric
    arrays with the derivative axes leading."""
    tables = [f(x)]
    for k in range(1, 5):
        table = np.zeros((dim,) * k + tables[0].shape)
        for axes in itertools.combinations_with_replacement(range(dim), k):
            d = _richardson(f, x, axes, h)
            for perm in set(itertools.permutations(axes)):
                table[perm] = d
        tables.append(table)
    return tables


def finite_difference_package(patch, point, h: float = 1e-2) -> CurvaturePackage:
    """Same data as :func:`curvature_package`, with every metric derivative
    estimated by Richardson-extrapolated central differences and the
    curvature assembled by explicit chain-rule formulas.  Use as an oracle;
    accuracy is limited by the finite-difference truncation error."""
    if h <= 0:
        raise ValueError("step size must be positive")
    pt = np.asarray(point, dtype=float)
    d = patch.dim
    g0, dg, d2g, d3g, d4g = _derivative_tables(patch.evaluate, pt, d, h)
    _spd_or_raise(g0, "at the base point")
    gi = np.linalg.inv(g0)

    # derivatives of the inverse metric from d(g^-1) = -g^-1 dg g^-1
    dgi = -np.einsum("ij,ajk,kl->ail", gi, dg, gi)
    d2gi = -(
        np.einsum("bij,ajk,kl->abil", dgi, dg, gi)
        + np.einsum("ij,abjk,kl->abil", gi, d2g, gi)
        + np.einsum("ij,ajk,bkl->abil", gi, dg, dgi)
    )
    d3gi = -(
        np.einsum("bcij,ajk,kl->abcil", d2gi, dg, gi)
        + np.einsum("bij,acjk,kl->abcil", dgi, d2g, gi)
        + np.einsum("bij,ajk,ckl->abcil", dgi, dg, dgi)
        + np.einsum("cij,abjk,kl->abcil", dgi, d2g, gi)
        + np.einsum("ij,abcjk,kl->abcil", gi, d3g, gi)
        + np.einsum("ij,abjk,ckl->abcil", gi, d2g, dgi)
        + np.einsum("cij,ajk,bkl->abcil", dgi, dg, dgi)
        + np.einsum("ij,acjk,bkl->abcil", gi, d2g, dgi)
        + np.einsum("ij,ajk,bckl->abcil", gi, dg, d2gi)
    )

    # w[l,i,j] = d_i g_jl + d_j g_il - d_l g_ij and its derivatives
    def w_of(t):  # t has derivative axes leading, value axes (a, i, j) trailing
        return np.einsum("...ijl->...lij", t) + np.einsum("...jil->...lij", t) - t

    w, dw, d2w, d3w = w_of(dg), w_of(d2g), w_of(d3g), w_of(d4g)

    gamma = 0.5 * np.einsum("kl,lij->kij", gi, w)
    dgamma = 0.5 * (np.einsum("ckl,lij->ckij", dgi, w) + np.einsum("kl,clij->ckij", gi, dw))
    d2gamma = 0.5 * (
        np.einsum("cdkl,lij->cdkij", d2gi, w)
        + np.einsum("ckl,dlij->cdkij", dgi, dw)
        + np.einsum("dkl,clij->cdkij", dgi, dw)
        + np.einsum("kl,cdlij->cdkij", gi, d2w)
    )
    d3gamma = 0.5 * (
        np.einsum("cdekl,lij->cdekij", d3gi, w)
        + np.einsum("cdkl,elij->cdekij", d2gi, dw)
        + np.einsum("cekl,dlij->cdekij", d2gi, dw)
        + np.einsum("dekl,clij->cdekij", d2gi, dw)
        + np.einsum("ckl,delij->cdekij", dgi, d2w)
        + np.einsum("dkl,celij->cdekij", dgi, d2w)
        + np.einsum("ekl,cdlij->cdekij", dgi, d2w)
        + np.einsum("kl,cdelij->cdekij", gi, d3w)
    )

    # ru[i,j,k,l] = R^l_ijk and its first two derivatives
    ru = (
        np.einsum("iljk->ijkl", dgamma)
        - np.einsum("jlik->ijkl", dgamma)
        + np.einsum("mjk,lim->ijkl", gamma, gamma)
        - np.einsum("mik,ljm->ijkl", gamma, gamma)
    )
    dru = (
        np.einsum("ciljk->cijkl", d2gamma)
        - np.einsum("cjlik->cijkl", d2gamma)
        + np.einsum("cmjk,lim->cijkl", dgamma, gamma)
        + np.einsum("mjk,clim->cijkl", gamma, dgamma)
        - np.einsum("cmik,ljm->cijkl", dgamma, gamma)
        - np.einsum("mik,cljm->cijkl", gamma, dgamma)
    )
    d2ru = (
        np.einsum("cdiljk->cdijkl", d3gamma)
        - np.einsum("cdjlik->cdijkl", d3gamma)
        + np.einsum("cdmjk,lim->cdijkl", d2gamma, gamma)
        + np.einsum("cmjk,dlim->cdijkl", dgamma, dgamma)
        + np.einsum("dmjk,clim->cdijkl", dgamma, dgamma)
        + np.einsum("mjk,cdlim->cdijkl", gamma, d2gamma)
        - np.einsum("cdmik,ljm->cdijkl", d2gamma, gamma)
        - np.einsum("cmik,dljm->cdijkl", dgamma, dgamma)
        - np.einsum("dmik,cljm->cdijkl", dgamma, dgamma)
        - np.einsum("mik,cdljm->cdijkl", gamma, d2gamma)
    )

    riem = np.einsum("lm,ijkm->ijkl", g0, ru)
    # rho_ij = R^a_aji (equals g^ab R_iabj by the pair symmetry)
    rho = np.einsum("ajia->ij", ru)
    drho = np.einsum("cajia->cij", dru)
    d2rho = np.einsum("cdajia->cdij", d2ru)

    tau = float(np.einsum("ij,ij->", gi, rho))
    dtau = np.einsum("cij,ij->c", dgi, rho) + np.einsum("ij,cij->c", gi, drho)
    d2tau = (
        np.einsum("cdij,ij->cd", d2gi, rho)
        + np.einsum("cij,dij->cd", dgi, drho)
        + np.einsum("dij,cij->cd", dgi, drho)
        + np.einsum("ij,cdij->cd", gi, d2rho)
    )
    hess = d2tau - np.einsum("kij,k->ij", gamma, dtau)
    lap = float(np.einsum("ij,ij->", gi, hess))

    t1 = drho - np.einsum("mai,mj->aij", gamma, rho) - np.einsum("maj,im->aij", gamma, rho)
    dt1 = (
        d2rho  # d2rho[b,a,i,j] = d_b d_a rho_ij = d_b of the drho term
        - np.einsum("bmai,mj->baij", dgamma, rho)
        - np.einsum("mai,bmj->baij", gamma, drho)
        - np.einsum("bmaj,im->baij", dgamma, rho)
        - np.einsum("maj,bim->baij", gamma, drho)
    )
    s = (
        dt1
        - np.einsum("mba,mij->baij", gamma, t1)
        - np.einsum("mbi,amj->baij", gamma, t1)
        - np.einsum("mbj,aim->baij", gamma, t1)
    )
    rough = np.einsum("ba,baij->ij", gi, s)

    return CurvaturePackage(
        dim=d,
        point=pt,
        g=g0,
        g_inv=gi,
        riemann=Tensor(d, (LOWER,) * 4, riem),
        ricci=Sym2Form(d, rho),
        tau=tau,
        grad_tau=dtau,
        hess_tau=Sym2Form(d, hess),
        lap_tau=lap,
        rough_lap_ricci=Sym2Form(d, rough),
        frame=COORDINATE,
    )
