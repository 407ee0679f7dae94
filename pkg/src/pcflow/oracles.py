"""Independent, slower reimplementations used to validate the main path.

These deliberately take different routes to the same quantities:

* chern_curvature_S builds connection coefficients and curvature explicitly
  and traces, instead of the expanded composite formula;
* dense_ground_state assembles the full symmetric operator matrix on a tiny
  grid and calls a dense solver, instead of the iterative path;
* minimize_f_energy performs constrained first-order minimization of the
  energy functional directly over the log-density, instead of the spectral
  substitution;
* fd_time_derivative differentiates stored trajectories in time and compares
  against analytic right-hand sides.

Oracles are validated first; the optimized main path must match them.
"""

from __future__ import annotations

import numpy as np
import scipy.optimize

from .chern import metric_first_derivs
from .fields import det_real, inverse, sup_abs
from .functionals import (grad_norm_sq, scalar_potential, schrodinger_apply,
                          _laplace_apply)
from .grid import ComplexTorusGrid
from .riemannian import real_metric_inverse

DENSE_SITE_LIMIT = 1296


def chern_curvature_S(grid: ComplexTorusGrid, g: np.ndarray) -> np.ndarray:
    """S by the connection route: Gam^l_{ik} = g^{l mbar} d_i g_{k mbar},
    Om_{i jbar k}^l = -d_jbar Gam^l_{ik}, lowered and traced."""
    n = grid.n_complex
    ginv = inverse(g)
    dh = metric_first_derivs(grid, g)
    gam = np.einsum("lm...,ikm...->lik...", ginv, dh)
    om = np.zeros((n, n, n, n) + grid.shape, dtype=complex)
    for j in range(n):
        dgam = grid.d_antiholo(gam, j)          # [p, i, k]
        om[:, j] = np.einsum("pik...,pl...->ikl...", -dgam, g)
    return np.einsum("ij...,ijkl...->kl...", ginv, om)


def dense_ground_state(grid: ComplexTorusGrid, g: np.ndarray,
                       T3: np.ndarray) -> float:
    """Smallest eigenvalue of -4 lap_b + (R - |T3|^2/12) by dense assembly."""
    if grid.site_count > DENSE_SITE_LIMIT:
        raise ValueError(
            f"dense oracle limited to {DENSE_SITE_LIMIT} sites, "
            f"grid has {grid.site_count}")
    gr_inv = real_metric_inverse(g)
    rho = det_real(g)
    V = scalar_potential(grid, g, T3)
    sq = np.sqrt(rho)
    nsites = grid.site_count
    mat = np.empty((nsites, nsites))
    basis = np.zeros(nsites)
    for j in range(nsites):
        basis[j] = 1.0
        col = sq * schrodinger_apply(grid, gr_inv, rho, V,
                                     basis.reshape(grid.shape) / sq)
        mat[:, j] = col.real.reshape(-1)
        basis[j] = 0.0
    mat = 0.5 * (mat + mat.T)
    return float(np.linalg.eigvalsh(mat)[0])


def minimize_f_energy(grid: ComplexTorusGrid, g: np.ndarray, T3: np.ndarray,
                      f0: np.ndarray | None = None, gtol: float = 1e-10,
                      maxiter: int = 2000):
    """Constrained minimization of the energy over f with int e^{-f} dV = 1.

    The constraint is absorbed by shifting f by log int e^{-f} dV; the
    gradient of the shifted functional is projected accordingly.  Returns
    (value, f).
    """
    gr_inv = real_metric_inverse(g)
    rho = det_real(g)
    V = scalar_potential(grid, g, T3)
    cell = grid.spacing ** grid.real_dim
    dim = grid.real_dim

    def normalize(f):
        z = np.sum(np.exp(-f) * rho) * cell
        return f + np.log(z)

    def value_grad(fflat):
        f = normalize(fflat.reshape(grid.shape))
        ef = np.exp(-f)
        gsq = grad_norm_sq(grid, gr_inv, f)
        val = np.sum((V + gsq) * ef * rho) * cell
        lap_f = _laplace_apply(grid, gr_inv, rho, f.astype(complex)).real
        dens = ef * (-V - 2.0 * lap_f + gsq)
        # project onto the constraint tangent int e^{-f} df dV = 0
        total = np.sum(dens * rho) * cell
        dens = dens - total * ef    # int e^{-f} dV = 1 after normalize
        return val, (dens * rho * cell).reshape(-1)

    if f0 is None:
        f0 = np.zeros(grid.shape)
    res = scipy.optimize.minimize(
        value_grad, f0.reshape(-1), jac=True, method="L-BFGS-B",
        options={"maxiter": maxiter, "gtol": gtol, "ftol": 1e-16})
    f = normalize(res.x.reshape(grid.shape))
    ef = np.exp(-f)
    gsq = grad_norm_sq(grid, gr_inv, f)
    return float(np.sum((V + gsq) * ef * rho) * cell), f


def fd_time_derivative(traj, quantity, rhs):
    """Centered-difference check of d/dt quantity(t, g, phi) == rhs(t, g, phi).

    quantity and rhs map a trajectory sample to a field (or scalar); returns
    the list of sup-norm residuals at the interior samples.  Requires a
    uniform-dt, store_every=1 trajectory.
    """
    if traj.store_every != 1 or not traj.uniform:
        raise ValueError("time-derivative oracle needs uniform unit-stride samples")
    dt = traj.dt
    out = []
    for k in range(1, len(traj) - 1):
        tm, gm, pm, _ = traj.sample(k - 1)
        t0, g0, p0, _ = traj.sample(k)
        tp, gp, pp, _ = traj.sample(k + 1)
        fd = (quantity(tp, gp, pp) - quantity(tm, gm, pm)) / (2.0 * dt)
        out.append(sup_abs(np.asarray(fd - rhs(t0, g0, p0))))
    return out
