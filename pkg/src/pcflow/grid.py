"""Periodic grid on the square complex torus and its derivative operators.

Fields are plain complex ndarrays whose trailing 2n axes are the grid axes,
ordered (x_1..x_n, y_1..y_n) with N points per axis.  Leading axes, if any,
are tensor indices; every operator here broadcasts over them.

Two derivative modes: 'spectral' (Fourier collocation, exact on band-limited
data) and 'central4' (fourth-order centered stencil, kept for order-of-
accuracy studies).  The spectral multiplier zeroes the Nyquist mode so that
derivatives of real fields stay real and the operator is exactly
antisymmetric under the plain grid sum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MODES = ("spectral", "central4")


@dataclass(frozen=True)
class ComplexTorusGrid:
    n_complex: int
    points_per_axis: int
    mode: str = "spectral"
    period: float = 2.0 * np.pi
    _wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = np.fft.fftfreq(self.points_per_axis, d=1.0 / self.points_per_axis)
        k = k * (2.0 * np.pi / self.period)
        if self.points_per_axis % 2 == 0:
            k[self.points_per_axis // 2] = 0.0  # Nyquist dropped
        object.__setattr__(self, "_wavenumbers", k)

    @property
    def spacing(self) -> float:
        return self.period / self.points_per_axis

    @property
    def real_dim(self) -> int:
        return 2 * self.n_complex

    @property
    def shape(self) -> tuple:
        return (self.points_per_axis,) * self.real_dim

    @property
    def site_count(self) -> int:
        return self.points_per_axis ** self.real_dim

    def coords(self):
        """Real coordinate arrays (x_1..x_n, y_1..y_n), each of grid shape."""
        axis = np.arange(self.points_per_axis) * self.spacing
        grids = np.meshgrid(*([axis] * self.real_dim), indexing="ij")
        return grids

    def zeros(self, *tensor_shape) -> np.ndarray:
        return np.zeros(tuple(tensor_shape) + self.shape, dtype=complex)

    def check_field(self, f: np.ndarray):
        if f.shape[-self.real_dim:] != self.shape:
            raise ValueError(
                f"field trailing shape {f.shape[-self.real_dim:]} does not "
                f"match grid shape {self.shape}")

    # -- real-axis derivatives ------------------------------------------------

    def deriv(self, f: np.ndarray, axis: int) -> np.ndarray:
        """d/du_a along real axis `axis` (0..2n-1)."""
        if not 0 <= axis < self.real_dim:
            raise ValueError(f"axis {axis} out of range for 2n = {self.real_dim}")
        self.check_field(f)
        ax = f.ndim - self.real_dim + axis
        if self.mode == "spectral":
            fk = np.fft.fft(f, axis=ax)
            shape = [1] * f.ndim
            shape[ax] = self.points_per_axis
            fk *= 1j * self._wavenumbers.reshape(shape)
            return np.fft.ifft(fk, axis=ax)
        h = self.spacing
        return (8.0 * (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax))
                - (np.roll(f, -2, axis=ax) - np.roll(f, 2, axis=ax))) / (12.0 * h)

    # -- Wirtinger derivatives ------------------------------------------------

    def d_holo(self, f: np.ndarray, i: int) -> np.ndarray:
        """d_i = (d/dx_i - i d/dy_i)/2."""
        if not 0 <= i < self.n_complex:
            raise ValueError(f"complex axis {i} out of range for n = {self.n_complex}")
        return 0.5 * (self.deriv(f, i) - 1j * self.deriv(f, self.n_complex + i))

    def d_antiholo(self, f: np.ndarray, i: int) -> np.ndarray:
        """d_ibar = (d/dx_i + i d/dy_i)/2."""
        if not 0 <= i < self.n_complex:
            raise ValueError(f"complex axis {i} out of range for n = {self.n_complex}")
        return 0.5 * (self.deriv(f, i) + 1j * self.deriv(f, self.n_complex + i))


def make_grid(n_complex: int, N: int, mode: str = "spectral",
              _allow_small: bool = False) -> ComplexTorusGrid:
    """Build the periodic grid on (C/2pi Z x i 2pi Z)^n.

    N must be even and >= 8 (>= 4 for internal oracle grids), n_complex 1 or 2.
    """
    if n_complex not in (1, 2):
        raise ValueError(f"n_complex must be 1 or 2, got {n_complex}")
    if N % 2 != 0:
        raise ValueError(f"N must be even, got {N}")
    floor = 4 if _allow_small else 8
    if N < floor:
        raise ValueError(f"N must be >= {floor}, got {N}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return ComplexTorusGrid(n_complex=n_complex, points_per_axis=N, mode=mode)
