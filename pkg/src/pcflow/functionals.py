"""Scalar functionals and monitors of one metric or of a stored trajectory.

The energy functional F(g, T3, f) = int [R - |T3|^2/12 + |grad f|^2] e^{-f} dV
and its constrained infimum lambda are evaluated through the substitution
u = e^{-f/2}: lambda is the smallest eigenvalue of -4 lap_b + (R - |T3|^2/12)
on L^2(dV).  That spectral reformulation is validated against direct
minimization and a dense solve in the oracle module; the iterative path here
is a preconditioned LOBPCG with an optional warm start.

Entropy bookkeeping, the degree/volume-rate pair, the maximum-principle
monitors, the connection-difference gradient W, the holomorphic-form
Laplacian identity and the static residual live here too; each applies its
own documented prefactor to the raw contractions (conventions.py).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from . import conventions as conv
from .chern import (bismut_ricci_11, chern_ricci, chern_torsion, dstar_omega,
                    lap_canonical, metric_first_derivs)
from .fields import (det_real, grid_integral, inverse, log_det, matrix_inverse,
                     norm_sq_pq, sup_abs, trace_pair, volume_form_integral,
                     wedge_integral_11)
from .grid import ComplexTorusGrid
from .riemannian import (h_contraction, real_inverse, real_metric,
                         real_metric_inverse, ricci)


def torsion3_norm_sq(T3: np.ndarray, gr_inv: np.ndarray) -> np.ndarray:
    """Full contraction |T3|^2 with the real inverse metric."""
    return np.einsum("ad...,be...,cf...,abc...,def...->...",
                     gr_inv, gr_inv, gr_inv, T3, T3)


def grad_norm_sq(grid: ComplexTorusGrid, gr_inv: np.ndarray,
                 f: np.ndarray) -> np.ndarray:
    df = np.stack([grid.deriv(f, a).real for a in range(grid.real_dim)])
    return np.einsum("ab...,a...,b...->...", gr_inv, df, df)


def scalar_potential(grid: ComplexTorusGrid, g: np.ndarray,
                     T3: np.ndarray) -> np.ndarray:
    """V = R - |T3|^2 / 12."""
    gr = real_metric(g)
    _, scal = ricci(grid, gr)
    return scal - conv.ENERGY_TORSION_COEFF * torsion3_norm_sq(
        T3, real_inverse(gr))


def f_energy(grid: ComplexTorusGrid, g: np.ndarray, T3: np.ndarray,
             f: np.ndarray) -> float:
    """F = int [R - |T3|^2/12 + |grad f|^2] e^{-f} dV."""
    gr_inv = real_metric_inverse(g)
    dens = scalar_potential(grid, g, T3) + grad_norm_sq(grid, gr_inv, f)
    return volume_form_integral(grid, g, dens * np.exp(-f))


def _laplace_apply(grid, gr_inv, rho, u):
    dim = grid.real_dim
    du = np.stack([grid.deriv(u, b) for b in range(dim)])
    w = np.einsum("ab...,b...->a...", gr_inv, du) * rho
    out = np.zeros_like(w[0])
    for a in range(dim):
        out = out + grid.deriv(w[a], a)
    return out / rho


def schrodinger_apply(grid: ComplexTorusGrid, gr_inv: np.ndarray,
                      rho: np.ndarray, V: np.ndarray,
                      u: np.ndarray) -> np.ndarray:
    """(-4 lap_b + V) u, self-adjoint on the rho-weighted grid sum."""
    return -4.0 * _laplace_apply(grid, gr_inv, rho, u) + V * u


def lambda_eig(grid: ComplexTorusGrid, g: np.ndarray, T3: np.ndarray,
               tol: float = 1e-11, maxiter: int = 2000, warm=None):
    """Ground state of -4 lap_b + (R - |T3|^2/12) on L^2(dV).

    Returns (lam, f, info) with f = -2 log u normalized to
    int e^{-f} dV = 1; info carries the minimizer u and the operator
    residual ``resid``.
    """
    gr_inv = real_metric_inverse(g)
    rho = det_real(g)
    V = scalar_potential(grid, g, T3)
    sq = np.sqrt(rho)
    nsites = grid.site_count

    def sym_apply(vflat):
        v = vflat.reshape(grid.shape)
        out = sq * schrodinger_apply(grid, gr_inv, rho, V, v / sq)
        return out.real.reshape(-1)

    op = spla.LinearOperator((nsites, nsites),
                             matvec=sym_apply, dtype=float)

    # flat-operator preconditioner: symbol of -4 lap_b at g = id is 2|k|^2
    kfull = [np.fft.fftfreq(grid.points_per_axis, 1.0 / grid.points_per_axis)
             for _ in range(grid.real_dim)]
    ks = np.meshgrid(*kfull, indexing="ij")
    k2 = sum(k * k for k in ks)
    shift = 1.0 + max(0.0, -float(np.min(V)))
    psym = 1.0 / (2.0 * k2 + shift)

    def precond(vflat):
        v = vflat.reshape(grid.shape)
        out = np.fft.ifftn(np.fft.fftn(v) * psym)
        return out.real.reshape(-1)

    M = spla.LinearOperator((nsites, nsites), matvec=precond, dtype=float)

    rng = np.random.default_rng(12345)
    lead = warm.reshape(-1) if warm is not None else sq.reshape(-1)
    X = np.column_stack([lead, rng.standard_normal(nsites)])
    X /= np.linalg.norm(X, axis=0)
    try:
        vals, vecs = spla.lobpcg(op, X, M=M, tol=tol, maxiter=maxiter,
                                 largest=False)
        order = np.argsort(vals)
        lam = float(vals[order[0]])
        v = vecs[:, order[0]]
    except Exception:
        vals, vecs = spla.eigsh(op, k=1, which="SA", v0=lead,
                                maxiter=max(maxiter, 5000))
        lam = float(vals[0])
        v = vecs[:, 0]
    resid = float(np.linalg.norm(sym_apply(v) - lam * v))

    u = (v.reshape(grid.shape) / sq).real
    if np.sum(u * rho) < 0:
        u = -u
    if np.min(u) <= 0:
        raise RuntimeError(
            f"ground state not positive (min {np.min(u):.3e}); "
            f"eigensolver residual {resid:.3e}")
    cell = grid.spacing ** grid.real_dim
    u = u / np.sqrt(np.sum(u * u * rho) * cell)
    f = -2.0 * np.log(u)
    return lam, f, {"u": u, "resid": resid, "sym_vec": v}


def w_plus(grid: ComplexTorusGrid, g: np.ndarray, T3: np.ndarray,
           u: np.ndarray, sigma: float) -> float:
    """int [sigma(|grad u|^2/u + R u - |T3|^2 u / 12) + u log u] dV."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if np.min(u) <= 0:
        raise ValueError("u must be positive")
    gr_inv = real_metric_inverse(g)
    V = scalar_potential(grid, g, T3)
    dens = sigma * (grad_norm_sq(grid, gr_inv, u) / u + V * u) + u * np.log(u)
    return volume_form_integral(grid, g, dens)


def w_plus_entropy(grid: ComplexTorusGrid, g: np.ndarray, T3: np.ndarray,
                   u: np.ndarray, sigma: float) -> float:
    """Entropy normalization of w_plus whose monotonicity the flow theory
    guarantees: w_plus + (d/2) log(4 pi sigma) + d, d = real dimension."""
    d = grid.real_dim
    return (w_plus(grid, g, T3, u, sigma)
            + 0.5 * d * np.log(4.0 * np.pi * sigma) + d)


def degree(grid: ComplexTorusGrid, g: np.ndarray) -> float:
    """int <c1, w>: wedge of the Chern-Ricci representative with w (n = 2)."""
    if grid.n_complex != 2:
        raise ValueError("degree implemented for n = 2 only")
    return wedge_integral_11(grid, chern_ricci(grid, g), g)


def dstar_norm_sq_herm(grid: ComplexTorusGrid, g: np.ndarray) -> np.ndarray:
    """|d*w|^2 with the (0,1)-norm used by the volume-rate identity
    (equals the g_real norm of the real 1-form d*w)."""
    beta = dstar_omega(grid, g)
    return conv.HERMITIAN_01_NORM_FACTOR * np.einsum(
        "ml...,l...,m...->...", inverse(g), beta, np.conj(beta)).real


def volume_rate_formula(grid: ComplexTorusGrid, g: np.ndarray) -> float:
    """2 int |d*w|^2 dV - degree (the analytic volume rate)."""
    d = degree(grid, g) if grid.n_complex == 2 else 0.0
    return 2.0 * volume_form_integral(grid, g, dstar_norm_sq_herm(grid, g)) - d


def volume_and_rate(traj, k: int):
    """(Vol, centered-difference dVol/dt, analytic rate) at sample k."""
    grid = traj.grid
    if k <= 0 or k >= len(traj) - 1:
        raise ValueError("volume rate needs an interior trajectory sample")
    vols = [volume_form_integral(grid, traj.gs[j]) for j in (k - 1, k, k + 1)]
    dt = traj.times[k + 1] - traj.times[k]
    fd = (vols[2] - vols[0]) / (2.0 * dt)
    return vols[1], fd, volume_rate_formula(grid, traj.gs[k])


def trace_monitors(grid: ComplexTorusGrid, g: np.ndarray, gtilde: np.ndarray,
                   phi: np.ndarray, A: float):
    """Sup of log tr_wt(w) - A phi and of the det-corrected variant."""
    tr = trace_pair(gtilde, g)
    m1 = np.log(tr) - A * phi
    m2 = m1 - (log_det(g) - log_det(gtilde))
    return float(np.max(m1)), float(np.max(m2))


def monitor_constant(grid: ComplexTorusGrid, gtilde: np.ndarray) -> float:
    """Measured stand-in for the background-curvature constant in the
    monitor inequalities: sup of |d gtilde|_{gt} + |d gtilde|^2_{gt}.
    Zero for a constant background."""
    dh = metric_first_derivs(grid, gtilde)
    gi = inverse(gtilde)
    nsq = np.einsum("pq...,ik...,jl...,pij...,qkl...->...",
                    gi, gi, gi, dh, np.conj(dh)).real
    nrm = np.sqrt(np.maximum(nsq, 0.0))
    return float(np.max(nrm + nsq))


def auto_monitor_A(grid: ComplexTorusGrid, gtilde: np.ndarray) -> float:
    return monitor_constant(grid, gtilde) + 1.0


def calabi_w(grid: ComplexTorusGrid, g: np.ndarray,
             gtilde: np.ndarray) -> np.ndarray:
    """W = |grad(h) h^{-1}|^2 for h = gtilde^{-1} g, with the reference
    connection of gtilde; zero iff the two connections coincide."""
    n = grid.n_complex
    gti = inverse(gtilde)
    h = np.einsum("ik...,jk...->ij...", gti, g)          # h^i_j
    dh_t = metric_first_derivs(grid, gtilde)
    gam_t = np.einsum("lm...,ikm...->lik...", gti, dh_t)  # Gam^l_{ik} of gtilde
    dh = np.stack([grid.d_holo(h, a) for a in range(n)])  # d_a h^i_j
    cov = (dh + np.einsum("iac...,cj...->aij...", gam_t, h)
           - np.einsum("caj...,ic...->aij...", gam_t, h))
    hinv = matrix_inverse(h)   # endomorphism inverse, plain composition
    ups = np.einsum("aic...,cj...->aij...", cov, hinv)
    ginv = inverse(g)
    return np.einsum("ab...,jl...,mn...,amj...,bnl...->...",
                     ginv, ginv, g, ups, np.conj(ups)).real


def bochner_residual(grid: ComplexTorusGrid, g: np.ndarray,
                     eta: np.ndarray) -> float:
    """sup | lap_c |eta|^2 - |grad eta|^2 - <S(eta), eta> | for a constant
    holomorphic (p,0) form given by its coefficient array (p = 1 or 2)."""
    n = grid.n_complex
    p = eta.ndim
    if p not in (1, 2):
        raise ValueError("holomorphic form degree must be 1 or 2")
    if eta.shape != (n,) * p:
        raise ValueError("eta must be a constant coefficient array")
    eta_f = np.multiply.outer(eta, np.ones(grid.shape))
    ginv = inverse(g)
    dh = metric_first_derivs(grid, g)
    from .chern import s_tensor
    S = s_tensor(grid, g)
    gam = np.einsum("am...,kim...->aki...", ginv, dh)   # Gam^a_{ki}

    if p == 1:
        nsq = np.einsum("ik...,i...,k...->...", ginv, eta_f,
                        np.conj(eta_f)).real
        grad = -np.einsum("aki...,a...->ki...", gam, eta_f)
        gsq = np.einsum("kl...,ij...,ki...,lj...->...",
                        ginv, ginv, grad, np.conj(grad)).real
        smix = np.einsum("ab...,ib...->ia...", ginv, S)  # S_i^a
        s_eta = np.einsum("ia...,a...->i...", smix, eta_f)
        spair = np.einsum("ik...,i...,k...->...", ginv, s_eta,
                          np.conj(eta_f)).real
    else:
        nsq = np.einsum("ik...,jl...,ij...,kl...->...",
                        ginv, ginv, eta_f, np.conj(eta_f)).real
        grad = -(np.einsum("aki...,aj...->kij...", gam, eta_f)
                 + np.einsum("akj...,ia...->kij...", gam, eta_f))
        gsq = np.einsum("kl...,ia...,jb...,kij...,lab...->...",
                        ginv, ginv, ginv, grad, np.conj(grad)).real
        smix = np.einsum("ab...,ib...->ia...", ginv, S)
        s_eta = (np.einsum("ia...,aj...->ij...", smix, eta_f)
                 + np.einsum("ja...,ia...->ij...", smix, eta_f))
        spair = np.einsum("ik...,jl...,ij...,kl...->...",
                          ginv, ginv, s_eta, np.conj(eta_f)).real
    lap = lap_canonical(grid, g, nsq)
    return sup_abs(lap - (gsq + spair))


def static_residual(grid: ComplexTorusGrid, g: np.ndarray,
                    lam: float) -> float:
    """sup | P11 - lam g |."""
    return sup_abs(bismut_ricci_11(grid, g) - lam * g)


def best_static_lambda(grid: ComplexTorusGrid, g: np.ndarray) -> float:
    """Least-squares constant lam for P11 ~ lam g (distance-to-static)."""
    p11 = bismut_ricci_11(grid, g)
    num = float(np.sum((np.conj(g) * p11).real))
    den = float(np.sum((np.conj(g) * g).real))
    return num / den


@dataclass
class DiagnosticsRecord:
    t: float
    volume: float
    degree: float
    lam: float
    F: float
    W_plus: float
    monitor24: float
    monitor25: float
    calabiW: float
    plres: float
    torsion2: float
    bident: float
    gident: float
    static_res: float

    CSV_HEADER = ("t,volume,degree,lambda,F,W_plus,monitor24,monitor25,"
                  "calabiW,plres,torsion2,bident,gident,static_res")

    def csv_row(self) -> str:
        vals = [self.t, self.volume, self.degree, self.lam, self.F,
                self.W_plus, self.monitor24, self.monitor25, self.calabiW,
                self.plres, self.torsion2, self.bident, self.gident,
                self.static_res]
        return ",".join("nan" if v is None or not np.isfinite(v)
                        else f"{v:.12e}" for v in vals)

    def residuals_ok(self):
        for name in ("plres", "torsion2", "bident", "gident", "static_res",
                     "calabiW"):
            if getattr(self, name) < 0:
                return False
        return self.volume > 0


def compute_diagnostics(grid: ComplexTorusGrid, t: float, g: np.ndarray,
                        phi: np.ndarray, gtilde: np.ndarray,
                        A: float, u: np.ndarray | None = None,
                        sigma: float | None = None, warm=None):
    """One DiagnosticsRecord for a flow sample; returns (record, eig_info)."""
    from .chern import (bismut_identity_residual, pluriclosed_residual,
                        torsion_3form)
    from .riemannian import gauge_identity_residual
    T3 = torsion_3form(grid, g)
    lam, f, info = lambda_eig(grid, g, T3, warm=warm)
    m24, m25 = trace_monitors(grid, g, gtilde, phi, A)
    T = chern_torsion(grid, g)
    wp = (w_plus_entropy(grid, g, T3, u, sigma)
          if u is not None and sigma is not None else float("nan"))
    deg = degree(grid, g) if grid.n_complex == 2 else 0.0
    return DiagnosticsRecord(
        t=t,
        volume=volume_form_integral(grid, g),
        degree=deg,
        lam=lam,
        F=f_energy(grid, g, T3, f),
        W_plus=wp,
        monitor24=m24,
        monitor25=m25,
        calabiW=float(np.max(calabi_w(grid, g, gtilde))),
        plres=pluriclosed_residual(grid, g),
        torsion2=float(np.max(norm_sq_pq(T, g, 2, 1))),
        bident=bismut_identity_residual(grid, g),
        gident=gauge_identity_residual(grid, g),
        static_res=static_residual(grid, g, best_static_lambda(grid, g)),
    ), info
