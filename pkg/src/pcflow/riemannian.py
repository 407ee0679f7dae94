"""Riemannian side: Levi-Civita curvature of g_real and the gauge identities.

The dictionary between the complex and real pictures (conventions.py):

    g_real = 2 [[Re g, Im g], [-Im g, Re g]]        over (x, y) axis blocks,
    and the same block map sends any Hermitian (1,1) coefficient matrix
    phi[i,j] to the symmetric 2-tensor phi_form(X, JY).

Christoffel symbols and curvature are built by spectral differentiation of
g_real; no second-difference shortcuts, so every residual test sees a single
differentiation pathway.  The exterior-calculus kit at the bottom (d,
covariant codifferential, Hodge-type Laplacian on 3-forms) exists for the
soliton residual and is restricted to real dimension 4.
"""

from __future__ import annotations

from itertools import permutations
from math import factorial

import numpy as np

from . import conventions as conv
from .chern import bismut_ricci_11, lee_form, torsion_3form
from .fields import inverse, sup_abs
from .grid import ComplexTorusGrid


def _dre(grid: ComplexTorusGrid, f: np.ndarray, axis: int) -> np.ndarray:
    """Real-part derivative of a real field (spectral output is complex)."""
    return grid.deriv(f, axis).real


def real_rep(m: np.ndarray) -> np.ndarray:
    """Multiplicative real 2n x 2n representation [[A, B], [-B, A]] of A + iB."""
    n = m.shape[0]
    out = np.zeros((2 * n, 2 * n) + m.shape[2:])
    out[:n, :n] = m.real
    out[:n, n:] = m.imag
    out[n:, :n] = -m.imag
    out[n:, n:] = m.real
    return out


def real_metric(g: np.ndarray) -> np.ndarray:
    """Riemannian metric of the Hermitian metric: g_real(X, Y) = w(X, JY)."""
    return 2.0 * real_rep(g)


def real_metric_inverse(g: np.ndarray) -> np.ndarray:
    # real_rep is multiplicative on the matrix picture, so feed it the
    # matrix inverse (= conj of the index-notation array)
    return 0.5 * real_rep(np.conj(inverse(g)))


def hermitian_to_real_tensor(p: np.ndarray) -> np.ndarray:
    """Symmetric real tensor phi(X, JY) of a Hermitian (1,1) coefficient matrix."""
    return 2.0 * real_rep(p)


def real_inverse(gr: np.ndarray) -> np.ndarray:
    """Pointwise inverse of a symmetric real tensor field (small dim)."""
    return np.moveaxis(np.linalg.inv(np.moveaxis(gr, (0, 1), (-2, -1))),
                       (-2, -1), (0, 1))


def metric_derivs_real(grid: ComplexTorusGrid, gr: np.ndarray) -> np.ndarray:
    """dgr[e, a, b] = d_e (g_real)_{ab}."""
    return np.stack([_dre(grid, gr, e) for e in range(grid.real_dim)])


def christoffel(grid: ComplexTorusGrid, gr: np.ndarray,
                gr_inv: np.ndarray | None = None) -> np.ndarray:
    """Levi-Civita symbols Gamma[c, a, b]."""
    if gr_inv is None:
        gr_inv = real_inverse(gr)
    dgr = metric_derivs_real(grid, gr)
    sym = (np.einsum("abd...->dab...", dgr) + np.einsum("bad...->dab...", dgr)
           - dgr)
    return 0.5 * np.einsum("cd...,dab...->cab...", gr_inv, sym)


def ricci(grid: ComplexTorusGrid, gr: np.ndarray):
    """(Ricci tensor, scalar curvature) of g_real.

    R_ab = d_c Gamma^c_ab - d_a Gamma^c_cb + Gamma^c_cd Gamma^d_ab
           - Gamma^c_ad Gamma^d_cb.
    """
    dim = grid.real_dim
    gr_inv = real_inverse(gr)
    gam = christoffel(grid, gr, gr_inv)
    div_gam = np.zeros((dim, dim) + grid.shape)
    for c in range(dim):
        div_gam += _dre(grid, gam[c], c)
    v = np.einsum("ccb...->b...", gam)
    dv = np.stack([_dre(grid, v, a) for a in range(dim)])
    quad1 = np.einsum("ccd...,dab...->ab...", gam, gam)
    quad2 = np.einsum("cad...,dcb...->ab...", gam, gam)
    rc = div_gam - dv + quad1 - quad2
    scal = np.einsum("ab...,ab...->...", gr_inv, rc)
    return rc, scal


def hessian(grid: ComplexTorusGrid, gr: np.ndarray, f: np.ndarray,
            gam: np.ndarray | None = None) -> np.ndarray:
    """Covariant Hessian D_a D_b f."""
    if gam is None:
        gam = christoffel(grid, gr)
    dim = grid.real_dim
    df = np.stack([_dre(grid, f, a) for a in range(dim)])
    ddf = np.stack([_dre(grid, df, a) for a in range(dim)])
    return ddf - np.einsum("cab...,c...->ab...", gam, df)


def lie_derivative_metric(grid: ComplexTorusGrid, X: np.ndarray,
                          gr: np.ndarray) -> np.ndarray:
    """(L_X g)_ab = X^c d_c g_ab + g_cb d_a X^c + g_ac d_b X^c."""
    dim = grid.real_dim
    dgr = metric_derivs_real(grid, gr)
    dX = np.stack([_dre(grid, X, a) for a in range(dim)])
    out = np.einsum("c...,cab...->ab...", X, dgr)
    out += np.einsum("cb...,ac...->ab...", gr, dX)
    out += np.einsum("ac...,bc...->ab...", gr, dX)
    return out


def h_contraction(T3: np.ndarray, gr: np.ndarray) -> np.ndarray:
    """H[a, b] = g^{cd} g^{ef} T_{ace} T_{bdf}; symmetric PSD."""
    gr_inv = real_inverse(gr)
    return np.einsum("cd...,ef...,ace...,bdf...->ab...", gr_inv, gr_inv, T3, T3)


def sharp(gr: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Raise a real 1-form to a vector field."""
    return np.einsum("ab...,b...->a...", real_inverse(gr), alpha)


def laplace_beltrami_scalar(grid: ComplexTorusGrid, gr_inv: np.ndarray,
                            rho: np.ndarray, f: np.ndarray) -> np.ndarray:
    """(1/rho) d_a (rho g^{ab} d_b f), divergence form.

    rho may be any constant multiple of det(g_real)^{1/2}; the constant
    cancels.  Exactly antisymmetry-compatible with the plain grid sum.
    """
    dim = grid.real_dim
    df = np.stack([grid.deriv(f, b) for b in range(dim)])
    flux = np.einsum("ab...,b...->a...", gr_inv, df) * rho
    out = np.zeros_like(flux[0])
    for a in range(dim):
        out = out + grid.deriv(flux[a], a)
    return out / rho


def gauge_identity_residual(grid: ComplexTorusGrid, g: np.ndarray) -> float:
    """Residual of the metric-flow decomposition into Riemannian data.

    Checks  -H = -Rc + H_T/4 - (1/2) L_{theta#} g_real  pointwise, where
    H = GAUGE_TENSOR_FACTOR * (real tensor of the (1,1) Bismut-Ricci form),
    H_T the torsion Gram contraction and theta the Lee form.  The factor
    (see conventions.py) records that the metric flow runs at half this
    combination: dg_real/dt = (1/2)(-Rc + H_T/4 - L/2).  Meaningful on
    pluriclosed input.
    """
    gr = real_metric(g)
    H = conv.GAUGE_TENSOR_FACTOR * hermitian_to_real_tensor(
        bismut_ricci_11(grid, g))
    rc, _ = ricci(grid, gr)
    ht = h_contraction(torsion_3form(grid, g), gr)
    theta = lee_form(grid, g)
    lie = lie_derivative_metric(grid, sharp(gr, theta), gr)
    return sup_abs(-H - (-rc + conv.FLOW_H_COEFF * ht - 0.5 * lie))


# -- exterior calculus on real forms (soliton residual support) --------------


def _perm_sign(p) -> float:
    sign = 1.0
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def antisymmetrize(t: np.ndarray, k: int) -> np.ndarray:
    """Antisymmetrize the leading k axes."""
    out = np.zeros_like(t)
    rest = tuple(range(k, t.ndim))
    for perm in permutations(range(k)):
        out += _perm_sign(perm) * np.transpose(t, tuple(perm) + rest)
    return out / factorial(k)


def d_form(grid: ComplexTorusGrid, alpha: np.ndarray, k: int) -> np.ndarray:
    """Exterior derivative of a fully antisymmetric real k-form array."""
    E = np.stack([_dre(grid, alpha, a) for a in range(grid.real_dim)])
    return (k + 1) * antisymmetrize(E, k + 1)


_SLOTS = "ijkl"


def codifferential(grid: ComplexTorusGrid, gr: np.ndarray, alpha: np.ndarray,
                   k: int, gam: np.ndarray | None = None) -> np.ndarray:
    """delta alpha = -g^{ab} (D_a alpha)_{b ...}, the adjoint of d."""
    if gam is None:
        gam = christoffel(grid, gr)
    dim = grid.real_dim
    idx = _SLOTS[:k]
    cov = np.stack([_dre(grid, alpha, a) for a in range(dim)])
    for s in range(k):
        gam_sub = "ca" + idx[s]
        alpha_sub = idx[:s] + "c" + idx[s + 1:]
        cov -= np.einsum(f"{gam_sub}...,{alpha_sub}...->a{idx}...", gam, alpha)
    gr_inv = real_inverse(gr)
    return -np.einsum(f"ab...,a{'b' + idx[1:]}...->{idx[1:]}...", gr_inv, cov)


def laplace_beltrami_form(grid: ComplexTorusGrid, gr: np.ndarray,
                          alpha: np.ndarray, k: int) -> np.ndarray:
    """Analyst-sign Hodge Laplacian -(d delta + delta d) on k-forms."""
    gam = christoffel(grid, gr)
    dd = d_form(grid, codifferential(grid, gr, alpha, k, gam), k - 1)
    sd = codifferential(grid, gr, d_form(grid, alpha, k), k + 1, gam)
    return -(dd + sd)


def interior_product_3form(X: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """(X . alpha)_{bc} = X^a alpha_{abc}."""
    return np.einsum("a...,abc...->bc...", X, alpha)


def soliton_residual(grid: ComplexTorusGrid, g: np.ndarray, T3: np.ndarray,
                     f: np.ndarray, lam: float):
    """Sup-norms of the two static-soliton equations.

    First: Rc - H_T/4 + Hess(f) - lam * g_real.  Second: the torsion
    equation lap_LB(T3) - d(grad f . T3); real dimension 4 only.
    """
    gr = real_metric(g)
    rc, _ = ricci(grid, gr)
    ht = h_contraction(T3, gr)
    gam = christoffel(grid, gr)
    hess_f = hessian(grid, gr, f, gam)
    met_res = sup_abs(rc - conv.FLOW_H_COEFF * ht + hess_f - lam * gr)
    if grid.n_complex != 2:
        raise ValueError("torsion soliton residual implemented for n = 2 only")
    grad_f = sharp(gr, np.stack([_dre(grid, f, a) for a in range(grid.real_dim)]))
    lap_t = laplace_beltrami_form(grid, gr, T3, 3)
    transport = d_form(grid, interior_product_3form(grad_f, T3), 2)
    tor_res = sup_abs(lap_t - transport)
    return met_res, tor_res
