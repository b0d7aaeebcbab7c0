"""Trigonometric-polynomial fields on periodic charts.

Used for random smooth test fields and for lifting periodic grid samples to
point-evaluable fields with exact partials (spectral interpolation).
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..errors import ContractError
from .fields import Array, ChartDomain, TensorField


class TrigField(TensorField):
    """``T(x) = sum_k a_k cos(k . u) + b_k sin(k . u)`` with ``u = 2 pi (x - lower) / extent``.

    ``modes`` has shape ``(M, n)`` (integer wave vectors); ``cos_coef`` and
    ``sin_coef`` have shape ``(M,) + component_shape``.
    """

    def __init__(self, modes, cos_coef, sin_coef, valence, chart: ChartDomain, name: str = ""):
        modes = np.asarray(modes, dtype=float).reshape(-1, chart.dim)
        cos_coef = np.asarray(cos_coef, dtype=float)
        sin_coef = np.asarray(sin_coef, dtype=float)
        if cos_coef.shape != sin_coef.shape or cos_coef.shape[0] != modes.shape[0]:
            raise ContractError("mode and coefficient arrays disagree in shape")
        self.modes = modes
        self.cos_coef = cos_coef
        self.sin_coef = sin_coef
        self._scale = 2 * np.pi / chart.extent
        self._wave = modes * self._scale  # physical wave vectors
        self._lower = np.asarray(chart.lower)
        super().__init__(self._value, valence, chart, jac=self._jacobian, hess=self._hessian, name=name)

    @property
    def component_shape(self) -> tuple:
        return self.cos_coef.shape[1:]

    def _phase(self, x):
        x = np.asarray(x, dtype=float)
        return (x - self._lower) @ self._wave.T

    def _value(self, x):
        ph = self._phase(x)
        c, s = np.cos(ph), np.sin(ph)
        return np.tensordot(c, self.cos_coef, axes=(-1, 0)) + np.tensordot(s, self.sin_coef, axes=(-1, 0))

    def _jacobian(self, x):
        ph = self._phase(x)
        c, s = np.cos(ph), np.sin(ph)
        # d/dx_m: (-a sin + b cos) k_m
        coef_c = np.einsum("k...,km->k...m", self.sin_coef, self._wave)
        coef_s = -np.einsum("k...,km->k...m", self.cos_coef, self._wave)
        return np.tensordot(c, coef_c, axes=(-1, 0)) + np.tensordot(s, coef_s, axes=(-1, 0))

    def _hessian(self, x):
        ph = self._phase(x)
        c, s = np.cos(ph), np.sin(ph)
        kk = np.einsum("km,kp->kmp", self._wave, self._wave)
        coef_c = -np.einsum("k...,kmp->k...mp", self.cos_coef, kk)
        coef_s = -np.einsum("k...,kmp->k...mp", self.sin_coef, kk)
        return np.tensordot(c, coef_c, axes=(-1, 0)) + np.tensordot(s, coef_s, axes=(-1, 0))

    def __add__(self, other: "TrigField") -> "TrigField":
        if not isinstance(other, TrigField) or other.valence != self.valence:
            return NotImplemented
        return TrigField(
            np.concatenate([self.modes, other.modes]),
            np.concatenate([self.cos_coef, other.cos_coef]),
            np.concatenate([self.sin_coef, other.sin_coef]),
            self.valence,
            self.chart,
            name=self.name,
        )

    def scaled(self, factor: float) -> "TrigField":
        return TrigField(self.modes, factor * self.cos_coef, factor * self.sin_coef, self.valence, self.chart, self.name)

    def mean(self) -> Array:
        """Constant (zero-mode) part of the field."""
        zero = np.all(self.modes == 0, axis=1)
        return self.cos_coef[zero].sum(axis=0)

    @classmethod
    def random(
        cls,
        chart: ChartDomain,
        valence: tuple,
        rng: np.random.Generator,
        max_mode: int = 2,
        amplitude: float = 1.0,
        decay: float = 1.0,
        zero_mean: bool = False,
        name: str = "",
    ) -> "TrigField":
        """Random smooth field with all modes ``|k|_inf <= max_mode``.

        Coefficients are normal with standard deviation
        ``amplitude / (1 + |k|^2)^(decay/2)``; only half of the lattice is used
        so cos/sin pairs are not double counted.
        """
        n = chart.dim
        grids = np.meshgrid(*[np.arange(-max_mode, max_mode + 1)] * n, indexing="ij")
        modes = np.stack([g.ravel() for g in grids], axis=1)
        # canonical half lattice: first nonzero entry positive (or zero vector)
        keep = []
        for k in modes:
            nz = np.flatnonzero(k)
            keep.append(len(nz) == 0 or k[nz[0]] > 0)
        modes = modes[np.asarray(keep)]
        comp_shape = (n,) * sum(valence)
        sd = amplitude / (1.0 + np.sum(modes**2, axis=1)) ** (decay / 2)
        sd = sd.reshape((-1,) + (1,) * len(comp_shape))
        cos_coef = sd * rng.standard_normal((len(modes),) + comp_shape)
        sin_coef = sd * rng.standard_normal((len(modes),) + comp_shape)
        zero = np.all(modes == 0, axis=1)
        sin_coef[zero] = 0.0
        if zero_mean:
            cos_coef[zero] = 0.0
        return cls(modes, cos_coef, sin_coef, valence, chart, name=name)

    @classmethod
    def from_grid(
        cls,
        values: Array,
        chart: ChartDomain,
        valence: tuple = (0, 0),
        rel_cutoff: float = 1e-14,
        name: str = "",
    ) -> "TrigField":
        """Spectral interpolant of samples on the uniform periodic node lattice.

        ``values`` has the grid shape followed by the component shape.  Fourier
        coefficients below ``rel_cutoff`` times the largest one are dropped.
        """
        if not chart.fully_periodic:
            raise ContractError("spectral interpolation needs a fully periodic chart")
        n = chart.dim
        values = np.asarray(values, dtype=float)
        shape = values.shape[:n]
        comp_shape = values.shape[n:]
        coef = np.fft.fftn(values, axes=tuple(range(n))) / np.prod(shape)
        freqs = np.meshgrid(*[np.fft.fftfreq(s, d=1.0 / s) for s in shape], indexing="ij")
        modes = np.stack([f.ravel() for f in freqs], axis=1)
        coef = coef.reshape((-1,) + comp_shape)
        mag = np.abs(coef).reshape(len(coef), -1).max(axis=1)
        keep = mag > rel_cutoff * max(float(mag.max()), np.finfo(float).tiny)
        # sum over the full lattice of Re(C) cos - Im(C) sin reproduces the real field
        return cls(modes[keep], coef.real[keep], -coef.imag[keep], valence, chart, name=name)


def sin_potential(chart: ChartDomain, axis: int, amplitude: float = 1.0, mode: int = 1) -> TrigField:
    """``amplitude * sin(mode * u_axis)`` as a scalar field."""
    k = np.zeros((1, chart.dim))
    k[0, axis] = mode
    return TrigField(k, np.zeros(1), np.array([amplitude]), (0, 0), chart, name=f"sin x{axis}")
