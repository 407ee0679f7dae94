"""Time integration: the metric flow, its volume-normalized version, the
potential equation, the reduced (0,1)-form flow, and the backward conjugate
heat equation.

The metric evolves by dg/dt = -P11 (coefficients, see chern.py); the scalar
potential rides along with dphi/dt = lap_c(phi) + tr_w(wtilde) - n.  The
reduced variant evolves a (0,1) form alpha with the metric reconstructed as
g0 + (d alpha + dbar conj(alpha)) - t * c1_rep(rho_bg) and must reproduce the
direct flow.

Explicit RK4 with a parabolic step bound dt = c_cfl * h^2 * (min eig / max
eig); rejected steps (positivity loss, NaN) halve dt up to a retry limit.
All evolved fields are checked, not projected: Hermitian symmetry and
positivity are revalidated after every accepted step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import conventions as conv
from .chern import (alpha_metric_coeffs, bismut_ricci_11, chern_ricci,
                    chern_torsion, dstar_omega, lap_canonical)
from .fields import (check_metric, det_real, eigenvalue_range, inverse,
                     sup_abs, trace_pair, volume_form_integral)
from .grid import ComplexTorusGrid
from .riemannian import real_metric, real_metric_inverse, ricci

VARIANTS = ("pcf", "normalized", "alpha_reduced")


class FlowHalt(RuntimeError):
    """Integration halted; carries a diagnostic snapshot."""

    def __init__(self, message, snapshot=None):
        super().__init__(message)
        self.snapshot = snapshot or {}


def constant_background(gtilde: np.ndarray):
    """Background family wtilde(t) = const, psi = 0."""
    def bg(t):
        return gtilde, None
    return bg


def pcf_rhs(grid: ComplexTorusGrid, g: np.ndarray) -> np.ndarray:
    """dg/dt coefficients of the unnormalized flow: -P11."""
    return -bismut_ricci_11(grid, g)


def normalized_rhs(grid: ComplexTorusGrid, g: np.ndarray) -> np.ndarray:
    """Volume-normalized flow: -P11 + (psi_n / n) g with mean-zero trace."""
    p11 = bismut_ricci_11(grid, g)
    vol = volume_form_integral(grid, g)
    psi_n = volume_form_integral(grid, g, trace_pair(g, p11)) / vol
    return -p11 + (psi_n / grid.n_complex) * g


def potential_rhs(grid: ComplexTorusGrid, g: np.ndarray, phi: np.ndarray,
                  gtilde: np.ndarray) -> np.ndarray:
    """dphi/dt = lap_c(phi) + tr_w(wtilde) - n."""
    return (lap_canonical(grid, g, phi) + trace_pair(g, gtilde)
            - grid.n_complex)


def alpha_rhs(grid: ComplexTorusGrid, g: np.ndarray,
              log_det_rho: np.ndarray | float) -> np.ndarray:
    """d(alpha)/dt = d*w + (i/4) dbar log(det g / det rho_bg)."""
    beta = dstar_omega(grid, g)
    ratio = np.log(det_real(g)) - log_det_rho
    dbar = np.stack([grid.d_antiholo(ratio.astype(complex), j)
                     for j in range(grid.n_complex)])
    return beta + 0.25j * dbar


def metric_from_alpha(grid: ComplexTorusGrid, g0: np.ndarray,
                      alpha: np.ndarray, t: float,
                      c1_rep: np.ndarray) -> np.ndarray:
    """g(t) = g0 + coeffs(d alpha + dbar conj alpha) - t * c1_rep."""
    return g0 + alpha_metric_coeffs(grid, alpha) - t * c1_rep


def cfl_dt(grid: ComplexTorusGrid, g: np.ndarray, c_cfl: float) -> float:
    lo, hi = eigenvalue_range(g)
    return c_cfl * grid.spacing ** 2 * (lo / hi)


@dataclass
class Trajectory:
    """Stored flow history.  With store_every=1, every accepted step is kept
    (needed by the time-derivative oracles and the conjugate heat solver)."""
    grid: ComplexTorusGrid
    dt: float
    times: list = field(default_factory=list)
    gs: list = field(default_factory=list)
    phis: list = field(default_factory=list)
    alphas: list = field(default_factory=list)
    store_every: int = 1
    uniform: bool = True
    variant: str = "pcf"

    def sample(self, k: int):
        return (self.times[k], self.gs[k], self.phis[k],
                self.alphas[k] if self.alphas else None)

    def __len__(self):
        return len(self.times)


def _rk4(t, ys, dt, rhs):
    k1 = rhs(t, ys)
    k2 = rhs(t + 0.5 * dt, [y + 0.5 * dt * k for y, k in zip(ys, k1)])
    k3 = rhs(t + 0.5 * dt, [y + 0.5 * dt * k for y, k in zip(ys, k2)])
    k4 = rhs(t + dt, [y + dt * k for y, k in zip(ys, k3)])
    return [y + (dt / 6.0) * (a + 2 * b + 2 * c + d)
            for y, a, b, c, d in zip(ys, k1, k2, k3, k4)]


def _euler(t, ys, dt, rhs):
    return [y + dt * k for y, k in zip(ys, rhs(t, ys))]


_SCHEMES = {"rk4": _rk4, "euler": _euler}


def run_flow(grid: ComplexTorusGrid, g0: np.ndarray, t_end: float,
             variant: str = "pcf", scheme: str = "rk4",
             c_cfl: float = 0.1, dt_scale: float = 1.0,
             dt: float | None = None,
             background=None, rho_bg: np.ndarray | None = None,
             alpha0: np.ndarray | None = None,
             store_every: int = 1, max_retries: int = 8) -> Trajectory:
    """Integrate from g0 to t_end and return the trajectory.

    dt defaults to the parabolic bound at t = 0 times dt_scale and is held
    fixed unless a step is rejected (NaN or positivity loss), in which case
    it halves; more than max_retries rejections raise FlowHalt with a
    snapshot of the failing state.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown flow variant {variant!r}")
    if scheme not in _SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    stepper = _SCHEMES[scheme]
    check_metric(grid, g0, "initial metric")
    if background is None:
        from .fields import identity_metric
        background = constant_background(identity_metric(grid))
    n = grid.n_complex

    if variant == "alpha_reduced":
        if rho_bg is None:
            from .fields import identity_metric
            rho_bg = identity_metric(grid)
        c1_rep = chern_ricci(grid, rho_bg)
        log_det_rho = np.log(det_real(rho_bg))
        if alpha0 is None:
            alpha0 = grid.zeros(n)

        def rhs(t, ys):
            (alpha,) = ys
            g = metric_from_alpha(grid, g0, alpha, t, c1_rep)
            return [alpha_rhs(grid, g, log_det_rho)]

        ys = [alpha0.copy()]
    else:
        g_rhs = pcf_rhs if variant == "pcf" else normalized_rhs

        def rhs(t, ys):
            g, phi = ys
            gtilde, _ = background(t)
            return [g_rhs(grid, g), potential_rhs(grid, g, phi, gtilde)]

        ys = [g0.copy(), np.zeros(grid.shape)]

    if dt is None:
        dt = cfl_dt(grid, g0, c_cfl) * dt_scale
    traj = Trajectory(grid=grid, dt=dt, store_every=store_every,
                      variant=variant)

    def current_metric(t, ys):
        if variant == "alpha_reduced":
            return metric_from_alpha(grid, g0, ys[0], t, c1_rep)
        return ys[0]

    def record(k, t, ys):
        if traj.times and abs(traj.times[-1] - t) < 1e-15:
            return
        if k % store_every == 0 or t >= t_end - 1e-14:
            traj.times.append(t)
            traj.gs.append(current_metric(t, ys))
            traj.phis.append(ys[1].copy() if variant != "alpha_reduced"
                             else np.zeros(grid.shape))
            if variant == "alpha_reduced":
                traj.alphas.append(ys[0].copy())

    t = 0.0
    record(0, t, ys)
    k = 0
    nsteps = int(round(t_end / dt))
    nsteps = max(nsteps, 1)
    dt = t_end / nsteps
    traj.dt = dt
    while k < nsteps:
        retries = 0
        step_dt = dt
        while True:
            new = stepper(t, ys, step_dt, rhs)
            g_new = current_metric(t + step_dt, new)
            bad = any(not np.all(np.isfinite(y)) for y in new)
            if not bad:
                lo, _ = eigenvalue_range(g_new)
                bad = lo <= 1e-12
            if not bad:
                break
            retries += 1
            if retries > max_retries:
                raise FlowHalt(
                    f"positivity/NaN failure at t = {t:.6f} after "
                    f"{max_retries} halvings",
                    snapshot={"t": t, "g": current_metric(t, ys)})
            step_dt *= 0.5
            traj.uniform = False
        ys = new
        t += step_dt
        k += 1
        if step_dt != dt:
            # fall back to plain stepping on the reduced dt
            dt = step_dt
            nsteps = k + max(int(round((t_end - t) / dt)), 1)
        record(k, t, ys)
    check_metric(grid, current_metric(t, ys), "final metric")
    return traj


def kahler_trajectory_check(traj: Trajectory, tol: float = 1e-8) -> float:
    """Max torsion sup over stored states (gate for conjugate-heat runs)."""
    worst = 0.0
    for g in traj.gs:
        worst = max(worst, sup_abs(chern_torsion(traj.grid, g)))
    return worst


def conjugate_heat_backward(traj: Trajectory, u_final: np.ndarray,
                            override_non_kahler: bool = False):
    """Solve the conjugate density backward along a stored trajectory.

    du/dt = -(1/4) lap_b(u) + (R/4) u, integrated in reverse time on the
    measure m = u det(g): in divergence form the grid sum of m is conserved
    to round-off for any step size.  Requires store_every = 1 and (unless
    overridden) torsion-free data, where the mass/entropy statements hold
    without a gauge correction; the override adds the trace-rate source and
    is a diagnostic only.

    Returns the list of densities u(t_k) aligned with traj.times.
    """
    grid = traj.grid
    if traj.store_every != 1:
        raise ValueError("conjugate heat needs a trajectory with store_every=1")
    if not traj.uniform:
        raise ValueError("conjugate heat needs a uniform-dt trajectory")
    torsion = kahler_trajectory_check(traj)
    if torsion > 1e-8 and not override_non_kahler:
        raise ValueError(
            f"trajectory is not torsion-free (sup |T| = {torsion:.3e}); "
            "pass override_non_kahler=True for a diagnostic-only solve")
    if np.min(u_final.real) <= 0:
        raise ValueError("u_final must be positive")

    cell = grid.spacing ** grid.real_dim
    rhos = [det_real(g) for g in traj.gs]
    mass = float(np.sum(u_final.real * rhos[-1]) * cell)
    u_final = u_final / mass  # normalize int u dV = 1

    def flux_div(m, gri, rho):
        u = m / rho
        du = np.stack([grid.deriv(u, b) for b in range(grid.real_dim)])
        w = np.einsum("ab...,b...->a...", gri, du) * rho
        out = np.zeros_like(m)
        for a in range(grid.real_dim):
            out = out + grid.deriv(w[a], a)
        return out

    gris = [real_metric_inverse(g) for g in traj.gs]
    if override_non_kahler:
        sources = []
        for k, g in enumerate(traj.gs):
            _, scal = ricci(grid, real_metric(g))
            km = max(k - 1, 0)
            kp = min(k + 1, len(traj) - 1)
            dlogrho = ((np.log(rhos[kp]) - np.log(rhos[km]))
                       / ((kp - km) * traj.dt))
            sources.append(conv.CONJUGATE_HEAT_SCALAR_COEFF * scal + dlogrho)

    c = conv.CONJUGATE_HEAT_LAPLACE_COEFF
    us = [None] * len(traj)
    m = (u_final * rhos[-1]).astype(complex)
    us[-1] = m.real / rhos[-1]
    dtau = traj.dt
    for k in range(len(traj) - 2, -1, -1):
        gri_hi, rho_hi = gris[k + 1], rhos[k + 1]
        gri_mid = 0.5 * (gris[k] + gris[k + 1])
        rho_mid = 0.5 * (rhos[k] + rhos[k + 1])
        # reverse time flips the sign of the (non-divergence) source term
        f1 = c * flux_div(m, gri_hi, rho_hi)
        if override_non_kahler:
            f1 = f1 - sources[k + 1] * m
        m_half = m + 0.5 * dtau * f1
        f2 = c * flux_div(m_half, gri_mid, rho_mid)
        if override_non_kahler:
            f2 = f2 - 0.5 * (sources[k] + sources[k + 1]) * m_half
        m = m + dtau * f2
        u = m.real / rhos[k]
        if np.min(u) <= 0:
            raise FlowHalt(f"conjugate density lost positivity at step {k}")
        us[k] = u
    return us
