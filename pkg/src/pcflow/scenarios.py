"""Reproducible initial-data generators with known qualitative properties.

Kinds:
    flat              identity metric (fixed point of the flow)
    kahler_potential  g = id + ddbar(phi): zero torsion, zero ddbar(w)
    pluriclosed_alpha g = id + (d alpha + dbar conj(alpha)) coefficients:
                      ddbar(w) = 0 identically but generically nonzero torsion
    conformal         g = e^u id: generically NOT pluriclosed (negative
                      control for the residual tests)
    custom_modes      generic Hermitian perturbation, no structure guaranteed

All perturbations are finite Fourier sums with mode amplitudes eps/|m|^2,
band-limited below N/4, deterministic per seed.  Positivity is checked after
generation; on failure the admissible amplitude is bisected and reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import check_metric, eigenvalue_range, identity_metric
from .grid import ComplexTorusGrid

KINDS = ("flat", "kahler_potential", "pluriclosed_alpha", "conformal",
         "custom_modes")


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str = "flat"
    amplitude: float = 0.05
    seed: int = 0
    modes: tuple = ()   # integer frequency vectors over (x1..xn, y1..yn)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")


def _default_modes(n_complex: int):
    if n_complex == 1:
        return ((1, 0), (0, 1), (1, 1))
    return ((1, 0, 0, 0), (0, 1, 0, 1), (1, 0, 1, 0), (0, 0, 1, -1))


def _check_band_limit(modes, N: int):
    for m in modes:
        if max(abs(c) for c in m) >= max(N // 4, 1):
            raise ValueError(f"mode {m} exceeds band limit N/4 = {N // 4}")


def _phases(grid: ComplexTorusGrid, mode) -> np.ndarray:
    """e^{i m.u} sampled on the grid."""
    coords = grid.coords()
    arg = sum(m * u for m, u in zip(mode, coords))
    return np.exp(1j * np.asarray(arg))


def _holo_factors(n: int, mode):
    """lam_i with d_i e^{i m.u} = lam_i e^{i m.u}: lam_i = i(m_x - i m_y)/2."""
    return [0.5j * (mode[i] - 1j * mode[n + i]) for i in range(n)]


def _build(spec: ScenarioSpec, grid: ComplexTorusGrid) -> np.ndarray:
    n = grid.n_complex
    modes = tuple(tuple(m) for m in (spec.modes or _default_modes(n)))
    _check_band_limit(modes, grid.points_per_axis)
    rng = np.random.default_rng(spec.seed)
    g = identity_metric(grid)

    if spec.kind == "flat":
        return g

    if spec.kind == "kahler_potential":
        # real potential phi = sum Re(c e^{i m.u}); g_{ij} += d_i d_jbar phi,
        # assembled from the analytic mode derivatives:
        # d_i d_jbar Re(c w) = -lam_i conj(lam_j) Re(c w)
        for m in modes:
            c = spec.amplitude / float(np.dot(m, m)) * np.exp(2j * np.pi * rng.random())
            pot = (c * _phases(grid, m)).real
            lam = np.array(_holo_factors(n, m))
            hmat = -np.outer(lam, np.conj(lam))
            g += np.einsum("ij,...->ij...", hmat, pot)
        return g

    if spec.kind == "pluriclosed_alpha":
        coeffs = _alpha_modes(spec, grid, modes, rng)
        return g + alpha_perturbation(grid, modes, coeffs)

    if spec.kind == "conformal":
        u = np.zeros(grid.shape)
        for m in modes:
            c = spec.amplitude / float(np.dot(m, m)) * np.exp(2j * np.pi * rng.random())
            u += (c * _phases(grid, m)).real
        return g * np.exp(u)

    # custom_modes
    for m in modes:
        wave = _phases(grid, m)
        c = spec.amplitude / float(np.dot(m, m))
        h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        pert = np.einsum("ij,...->ij...", h, wave)
        g += 0.5 * c * (pert + np.conj(np.swapaxes(pert, 0, 1)))
    return g


def _alpha_modes(spec, grid, modes, rng):
    """Complex coefficients c[mode_index, j] of the (0,1) form alpha."""
    n = grid.n_complex
    out = np.zeros((len(modes), n), dtype=complex)
    for a, m in enumerate(modes):
        for j in range(n):
            out[a, j] = (spec.amplitude / float(np.dot(m, m))
                         * np.exp(2j * np.pi * rng.random()))
    return out


def alpha_perturbation(grid: ComplexTorusGrid, modes, coeffs) -> np.ndarray:
    """Hermitian coefficients of d(alpha) + dbar(conj alpha).

    alpha = sum_m coeffs[m, j] e^{i m.u} dzbar^j; the (1,1) coefficient picked
    up through w = i g dz ^ dzbar is
    h_{k jbar} = -i d_k alpha_j + i conj(d_j alpha_k).
    Analytic mode derivatives keep the construction exactly pluriclosed.
    """
    n = grid.n_complex
    h = grid.zeros(n, n)
    for m, cs in zip(modes, coeffs):
        wave = _phases(grid, m)
        lam = _holo_factors(n, m)
        for k in range(n):
            for j in range(n):
                d_k_alpha_j = lam[k] * cs[j] * wave
                d_j_alpha_k = lam[j] * cs[k] * wave
                h[k, j] += -1j * d_k_alpha_j + 1j * np.conj(d_j_alpha_k)
    return h


def generate(spec: ScenarioSpec, grid: ComplexTorusGrid) -> np.ndarray:
    """Generate the metric for `spec`; bit-identical for identical inputs."""
    g = _build(spec, grid)
    lo, _ = eigenvalue_range(g)
    if lo <= 1e-12:
        eps_max = _bisect_amplitude(spec, grid)
        raise ValueError(
            f"scenario {spec.kind!r} with amplitude {spec.amplitude} is not "
            f"positive definite (min eigenvalue {lo:.3e}); max admissible "
            f"amplitude ~ {eps_max:.4f}")
    check_metric(grid, g, what=f"scenario {spec.kind!r}")
    return g


def _bisect_amplitude(spec: ScenarioSpec, grid: ComplexTorusGrid,
                      iters: int = 30) -> float:
    lo, hi = 0.0, spec.amplitude
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        s = ScenarioSpec(kind=spec.kind, amplitude=mid, seed=spec.seed,
                         modes=spec.modes)
        if eigenvalue_range(_build(s, grid))[0] > 1e-12:
            lo = mid
        else:
            hi = mid
    return lo
