"""Pointwise algebra of metric and form fields on the torus grid.

Array layout conventions (used everywhere downstream):

* Hermitian metric: complex array ``g[i, j, <grid>]`` holding g_{i jbar};
  Hermitian in (i, j) and positive definite at every site.
* Complex (p, q) form/tensor: array with p holomorphic index axes followed by
  q antiholomorphic index axes, then grid axes.
* Real (1,1) forms are stored exactly like metrics (Hermitian coefficient
  matrix of i phi_{i jbar} dz^i ^ dzbar^j).

The volume element is dV = det(g) dx dy (flat identity -> (2pi)^{2n});
see conventions.py for how this sits relative to w^n/n!.
"""

from __future__ import annotations

import numpy as np

from .grid import ComplexTorusGrid

_EIG_TOL = 1e-12


def hermitian_defect(g: np.ndarray) -> float:
    """Max-abs deviation from g[i,j] = conj(g[j,i])."""
    return float(np.max(np.abs(g - np.conj(np.swapaxes(g, 0, 1)))))


def eigenvalue_range(g: np.ndarray):
    """(min, max) eigenvalue over all sites of a Hermitian 1x1 or 2x2 field."""
    n = g.shape[0]
    if n == 1:
        ev = g[0, 0].real
        return float(ev.min()), float(ev.max())
    if n == 2:
        tr = (g[0, 0] + g[1, 1]).real
        det = (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]).real
        disc = np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0))
        lo, hi = 0.5 * (tr - disc), 0.5 * (tr + disc)
        return float(lo.min()), float(hi.max())
    ev = np.linalg.eigvalsh(np.moveaxis(g, (0, 1), (-2, -1)))
    return float(ev.min()), float(ev.max())


def check_metric(grid: ComplexTorusGrid, g: np.ndarray, what: str = "metric"):
    """Hard validation: Hermitian symmetry and positive definiteness."""
    grid.check_field(g)
    defect = hermitian_defect(g)
    if defect > 1e-10:
        raise ValueError(f"{what}: Hermitian symmetry violated by {defect:.3e}")
    n = g.shape[0]
    if n == 1:
        ev = g[0, 0].real
    else:
        tr = (g[0, 0] + g[1, 1]).real
        det = (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]).real
        disc = np.sqrt(np.maximum(tr * tr - 4.0 * det, 0.0))
        ev = 0.5 * (tr - disc)
    lo = float(ev.min())
    if lo <= _EIG_TOL:
        site = np.unravel_index(int(np.argmin(ev)), grid.shape)
        raise ValueError(
            f"{what}: not positive definite, min eigenvalue {lo:.6e} at site {site}")


def matrix_inverse(g: np.ndarray) -> np.ndarray:
    """Plain pointwise matrix inverse: einsum('ij...,jk...', inv, g) = id."""
    n = g.shape[0]
    if n == 1:
        return 1.0 / g
    if n == 2:
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        inv = np.empty_like(g)
        inv[0, 0] = g[1, 1] / det
        inv[1, 1] = g[0, 0] / det
        inv[0, 1] = -g[0, 1] / det
        inv[1, 0] = -g[1, 0] / det
        return inv
    return np.moveaxis(np.linalg.inv(np.moveaxis(g, (0, 1), (-2, -1))), (-2, -1), (0, 1))


def inverse(g: np.ndarray) -> np.ndarray:
    """Index-notation inverse array ginv[i, j] ~ g^{i jbar}.

    Defined by contraction over the ANTIholomorphic pair:
    einsum('ij...,kj...', ginv, g) = id, so every index formula
    g^{i jbar} t_{... jbar ...} transcribes literally into einsum.  This is
    the transpose (= conjugate, for Hermitian input) of matrix_inverse.
    """
    return np.swapaxes(matrix_inverse(g), 0, 1)


def det_real(g: np.ndarray) -> np.ndarray:
    """det of the Hermitian coefficient matrix (real positive for PD input)."""
    n = g.shape[0]
    if n == 1:
        return g[0, 0].real
    if n == 2:
        return (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]).real
    return np.linalg.det(np.moveaxis(g, (0, 1), (-2, -1))).real


def log_det(g: np.ndarray) -> np.ndarray:
    return np.log(det_real(g))


def trace_pair(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """tr_a b = a^{k lbar} b_{k lbar}; real for Hermitian a, b."""
    return np.einsum("kl...,kl...->...", inverse(a), b).real


def identity_metric(grid: ComplexTorusGrid) -> np.ndarray:
    g = grid.zeros(grid.n_complex, grid.n_complex)
    for i in range(grid.n_complex):
        g[i, i] = 1.0
    return g


def volume_form_integral(grid: ComplexTorusGrid, g: np.ndarray,
                         s: np.ndarray | float = 1.0) -> float:
    """Integral of the scalar s against dV = det(g) dx dy (Riemann sum)."""
    cell = grid.spacing ** grid.real_dim
    val = np.sum(np.asarray(s) * det_real(g)) * cell
    return float(np.real(val))


def grid_integral(grid: ComplexTorusGrid, s: np.ndarray) -> float:
    """Plain coordinate integral (dV with the flat identity metric)."""
    return float(np.real(np.sum(s)) * grid.spacing ** grid.real_dim)


def norm_sq_pq(t: np.ndarray, g: np.ndarray, p: int, q: int) -> np.ndarray:
    """|t|^2 for a complex (p,q) tensor: full index-tuple contraction.

    No factorial normalization; antisymmetric inputs just count each
    component once per index tuple.
    """
    if p + q != t.ndim - g.ndim + 2:
        raise ValueError(f"tensor rank {t.ndim - g.ndim + 2} does not match (p,q)=({p},{q})")
    ginv = inverse(g)
    letters = "abcdefgh"
    holo = letters[:p]
    anti = letters[p:p + q]
    holo2 = letters[p + q:2 * p + q]
    anti2 = letters[2 * p + q:2 * p + 2 * q]
    terms = [holo + anti + "...", holo2 + anti2 + "..."]
    ops = [t, np.conj(t)]
    for a, b in zip(holo, holo2):
        terms.append(a + b + "...")
        ops.append(ginv)
    for a, b in zip(anti, anti2):
        terms.append(b + a + "...")
        ops.append(ginv)
    out = np.einsum(",".join(terms) + "->...", *ops)
    return out.real


def wedge_integral_11(grid: ComplexTorusGrid, a: np.ndarray, b: np.ndarray) -> float:
    """Integral of a ^ b for two real (1,1) forms, n = 2 only.

    With the i a_{i jbar} dz^i ^ dzbar^j coefficient convention,
    a ^ b = 4 (a_11 b_22 + a_22 b_11 - a_12 b_21 - a_21 b_12) dx1 dy1 dx2 dy2.
    """
    if grid.n_complex != 2:
        raise ValueError("wedge pairing of (1,1) forms implemented for n = 2 only")
    dens = (a[0, 0] * b[1, 1] + a[1, 1] * b[0, 0]
            - a[0, 1] * b[1, 0] - a[1, 0] * b[0, 1])
    return 4.0 * grid_integral(grid, dens.real)


def sup_abs(t: np.ndarray) -> float:
    return float(np.max(np.abs(t)))
