"""Chern/Bismut curvature and torsion quantities in coordinates.

Everything here is assembled from first and second Wirtinger derivatives of
the Hermitian metric.  Index formulas (see conventions.py for the factor
audit):

    T[k,m,q]  = d_k g_{m qbar} - d_m g_{k qbar}
    Q1[k,l]   = g^{m nbar} g^{p qbar} T_{k m qbar} conj(T_{l n pbar})
    S[k,l]    = g^{i jbar} (-g_{k lbar, i jbar}
                + g^{m nbar} g_{k nbar, i} g_{lbar m, jbar})
    P11       = (S - Q1) / 2
    ricci_chern = -(1/2) * (d dbar log det g)   (Hermitian coefficients)
    dstar[j]  = (i/2) g^{p qbar} (d_qbar g_{p jbar} - d_jbar g_{p qbar})

On pluriclosed data, ricci_chern - [d(d* w)]^{(1,1)} = P11 exactly; the
residual of that decomposition is the sharpest cross-check in the suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import conventions as conv
from .fields import inverse, log_det, sup_abs
from .grid import ComplexTorusGrid


def metric_first_derivs(grid: ComplexTorusGrid, g: np.ndarray) -> np.ndarray:
    """dh[k, i, j] = d_k g_{i jbar}.  Antiholomorphic derivatives follow by
    Hermitian symmetry: d_kbar g_{i jbar} = conj(dh[k, j, i])."""
    return np.stack([grid.d_holo(g, k) for k in range(grid.n_complex)])


def metric_mixed_second_derivs(grid: ComplexTorusGrid, g: np.ndarray,
                               dh: np.ndarray | None = None) -> np.ndarray:
    """dd[i, j, k, l] = d_i d_jbar g_{k lbar}."""
    if dh is None:
        dh = metric_first_derivs(grid, g)
    return np.stack([
        np.stack([grid.d_antiholo(dh[i], j) for j in range(grid.n_complex)])
        for i in range(grid.n_complex)])


def chern_torsion(grid: ComplexTorusGrid, g: np.ndarray,
                  dh: np.ndarray | None = None) -> np.ndarray:
    """Torsion T[k, m, q] ~ T_{k m qbar}, antisymmetric in (k, m)."""
    if dh is None:
        dh = metric_first_derivs(grid, g)
    return np.einsum("kmq...->kmq...", dh - np.swapaxes(dh, 0, 1))


def q1(grid: ComplexTorusGrid, g: np.ndarray,
       T: np.ndarray | None = None) -> np.ndarray:
    """Gram contraction of the torsion; Hermitian PSD at every site."""
    if T is None:
        T = chern_torsion(grid, g)
    ginv = inverse(g)
    return np.einsum("mn...,pq...,kmq...,lnp...->kl...",
                     ginv, ginv, T, np.conj(T))


def s_tensor(grid: ComplexTorusGrid, g: np.ndarray,
             dh: np.ndarray | None = None,
             dd: np.ndarray | None = None) -> np.ndarray:
    """Trace of the Chern curvature, S[k, l] ~ S_{k lbar}."""
    if dh is None:
        dh = metric_first_derivs(grid, g)
    if dd is None:
        dd = metric_mixed_second_derivs(grid, g, dh)
    ginv = inverse(g)
    term1 = -np.einsum("ij...,ijkl...->kl...", ginv, dd)
    term2 = np.einsum("ij...,mn...,ikn...,jlm...->kl...",
                      ginv, ginv, dh, np.conj(dh))
    return term1 + term2


def bismut_ricci_11(grid: ComplexTorusGrid, g: np.ndarray) -> np.ndarray:
    """(1,1) part of the Bismut-Ricci form, Hermitian coefficients."""
    dh = metric_first_derivs(grid, g)
    dd = metric_mixed_second_derivs(grid, g, dh)
    T = chern_torsion(grid, g, dh)
    S = s_tensor(grid, g, dh, dd)
    return conv.P11_COMBO_FACTOR * (S - q1(grid, g, T))


def chern_ricci(grid: ComplexTorusGrid, g: np.ndarray) -> np.ndarray:
    """Chern-Ricci form, coefficients of -(i/2) d dbar log det g."""
    f = log_det(g).astype(complex)
    du = np.stack([grid.d_holo(f, k) for k in range(grid.n_complex)])
    ddf = np.stack([grid.d_antiholo(du, l) for l in range(grid.n_complex)], axis=1)
    return conv.CHERN_RICCI_FACTOR * ddf


def dstar_omega(grid: ComplexTorusGrid, g: np.ndarray,
                dh: np.ndarray | None = None) -> np.ndarray:
    """(0,1) part of d*w by the coordinate formula; the (1,0) part is its
    conjugate.  Returns beta[j] ~ (d*w)_{jbar}."""
    if dh is None:
        dh = metric_first_derivs(grid, g)
    ginv = inverse(g)
    cdh = np.conj(dh)
    t1 = np.einsum("pq...,qjp...->j...", ginv, cdh)   # g^{p qbar} d_qbar g_{p jbar}
    t2 = np.einsum("pq...,jqp...->j...", ginv, cdh)   # g^{p qbar} d_jbar g_{p qbar}
    return 0.5j * (t1 - t2)


def dd_star_11(grid: ComplexTorusGrid, beta: np.ndarray) -> np.ndarray:
    """Hermitian coefficients of [d(d*w)]^{(1,1)} from the (0,1) piece beta."""
    M = np.stack([-1j * grid.d_holo(beta, k) for k in range(grid.n_complex)])
    return M + np.conj(np.swapaxes(M, 0, 1))


def bismut_identity_residual(grid: ComplexTorusGrid, g: np.ndarray) -> float:
    """sup | ricci_chern - [d(d*w)]^{(1,1)} - P11 |; discretization-level
    on pluriclosed input."""
    lhs = chern_ricci(grid, g) - dd_star_11(grid, dstar_omega(grid, g))
    return sup_abs(lhs - bismut_ricci_11(grid, g))


def pluriclosed_residual(grid: ComplexTorusGrid, g: np.ndarray,
                         dd: np.ndarray | None = None) -> float:
    """sup-norm of the coefficients of d dbar w (zero iff pluriclosed)."""
    n = grid.n_complex
    if n == 1:
        return 0.0
    if dd is None:
        dd = metric_mixed_second_derivs(grid, g)
    worst = 0.0
    for i in range(n):
        for k in range(i + 1, n):
            for j in range(n):
                for l in range(j + 1, n):
                    # antisymmetrized g_{i jbar, k lbar} combination
                    r = (dd[k, l, i, j] - dd[i, l, k, j]
                         - dd[k, j, i, l] + dd[i, j, k, l])
                    worst = max(worst, sup_abs(r))
    return worst


def omega_real(g: np.ndarray) -> np.ndarray:
    """The 2-form of the metric over real axes: W[a, b] = w(e_a, e_b)."""
    n = g.shape[0]
    A, B = g.real, g.imag
    W = np.zeros((2 * n, 2 * n) + g.shape[2:])
    W[:n, :n] = -2.0 * B
    W[:n, n:] = 2.0 * A
    W[n:, :n] = -2.0 * A
    W[n:, n:] = -2.0 * B
    return W


def complex_structure_matrix(n: int) -> np.ndarray:
    """J^b_a with J dx_i = dy_i ordering: Jm[b, a] such that J e_a = Jm[b,a] e_b."""
    J = np.zeros((2 * n, 2 * n))
    for i in range(n):
        J[n + i, i] = 1.0
        J[i, n + i] = -1.0
    return J


def torsion_3form(grid: ComplexTorusGrid, g: np.ndarray) -> np.ndarray:
    """Bismut torsion 3-form i(dbar - d)w with real components over real axes.

    Computed as -dw(J., J., J.), which equals i(dbar - d)w for a (1,1) form.
    """
    W = omega_real(g)
    E = np.stack([grid.deriv(W.astype(complex), a).real
                  for a in range(grid.real_dim)])
    dW = E - np.einsum("acb...->cab...", E) + np.einsum("bca...->cab...", E)
    Jm = complex_structure_matrix(grid.n_complex)
    return -np.einsum("xyz...,xa,yb,zc->abc...", dW, Jm, Jm, Jm)


def lap_canonical(grid: ComplexTorusGrid, g: np.ndarray,
                  f: np.ndarray) -> np.ndarray:
    """Canonical Laplacian g^{k lbar} d_k d_lbar f (real on real input)."""
    du = np.stack([grid.d_holo(f, k) for k in range(grid.n_complex)])
    dd = np.stack([grid.d_antiholo(du, l) for l in range(grid.n_complex)],
                  axis=1)
    out = np.einsum("kl...,kl...->...", inverse(g), dd)
    return out.real if np.isrealobj(f) else out


def alpha_metric_coeffs(grid: ComplexTorusGrid, alpha: np.ndarray) -> np.ndarray:
    """Hermitian (1,1) coefficients of d(alpha) + dbar(conj alpha) for a
    (0,1) form given by its component array alpha[j]."""
    n = grid.n_complex
    da = np.stack([grid.d_holo(alpha, k) for k in range(n)])  # da[k, j]
    return -1j * da + 1j * np.conj(np.swapaxes(da, 0, 1))


def lee_form(grid: ComplexTorusGrid, g: np.ndarray,
             beta: np.ndarray | None = None) -> np.ndarray:
    """Lee form theta = -J(delta w), real components over real axes.

    delta w is the g_real-codifferential, i.e. DSTAR_TO_CODIFF times the
    coordinate-formula d*w; equivalently theta^{(0,1)} = LEE_SIGN * i * that.
    Vanishes iff d*w vanishes.
    """
    if beta is None:
        beta = dstar_omega(grid, g)
    bd = conv.DSTAR_TO_CODIFF * beta
    n = grid.n_complex
    theta = np.zeros((2 * n,) + grid.shape)
    # real 1-form r of beta + conj(beta): r_x = 2 Re, r_y = 2 Im; theta = -J r
    theta[:n] = -2.0 * bd.imag * conv.LEE_SIGN
    theta[n:] = 2.0 * bd.real * conv.LEE_SIGN
    return theta


@dataclass
class CurvatureBundle:
    """All curvature/torsion quantities of one metric, shared-stack build."""
    S: np.ndarray
    Q1: np.ndarray
    P11: np.ndarray
    ricci_chern: np.ndarray
    torsion: np.ndarray        # (2,1) tensor T[k,m,q]
    torsion3: np.ndarray       # real 3-form over real axes
    lee: np.ndarray            # real 1-form over real axes
    dstar: np.ndarray          # (0,1) piece of d*w


def curvature_bundle(grid: ComplexTorusGrid, g: np.ndarray) -> CurvatureBundle:
    dh = metric_first_derivs(grid, g)
    dd = metric_mixed_second_derivs(grid, g, dh)
    T = chern_torsion(grid, g, dh)
    S = s_tensor(grid, g, dh, dd)
    Q = q1(grid, g, T)
    beta = dstar_omega(grid, g, dh)
    return CurvatureBundle(
        S=S, Q1=Q, P11=conv.P11_COMBO_FACTOR * (S - Q),
        ricci_chern=chern_ricci(grid, g),
        torsion=T, torsion3=torsion_3form(grid, g),
        lee=lee_form(grid, g, beta), dstar=beta)
