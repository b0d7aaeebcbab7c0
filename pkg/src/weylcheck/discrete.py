"""Sampling lattices, quadrature, periodic differentiation and discrete Hodge theory."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ContractError, UnsupportedError
from .tensor_core.fields import Array, ChartDomain, MetricField, TensorField

__all__ = [
    "B1Estimate",
    "CubicalDeRham",
    "PeriodicDifferentiator",
    "PeriodicGrid",
    "b1_estimate",
    "evaluate",
    "hodge_laplacian_1forms",
    "integrate",
]


class PeriodicGrid:
    """Tensor-product sampling lattice with quadrature weights.

    Periodic axes use the uniform trapezoidal rule (spectrally accurate for
    smooth periodic integrands).  Non-periodic axes use Gauss-Legendre nodes
    (``rule="gauss"``), which are interior and never land on a pole, or a
    composite Simpson rule on the box minus the singular tubes
    (``rule="simpson"``).  The chart's ``measure_weight`` multiplies the
    tensor-product weights.
    """

    def __init__(self, chart: ChartDomain, points_per_axis, rule: str = "gauss", fd_step: float = 1e-3):
        n = chart.dim
        if np.isscalar(points_per_axis):
            points_per_axis = [int(points_per_axis)] * n
        points_per_axis = [int(p) for p in points_per_axis]
        if len(points_per_axis) != n:
            raise ContractError(f"need {n} resolutions, got {len(points_per_axis)}")
        if rule not in ("gauss", "simpson"):
            raise ContractError(f"unknown quadrature rule {rule!r}")
        self.chart = chart
        self.rule = rule
        self.points_per_axis = points_per_axis
        nodes, weights = [], []
        for a, num in enumerate(points_per_axis):
            lo, hi = chart.lower[a], chart.upper[a]
            if chart.periodic[a]:
                x = lo + (hi - lo) * np.arange(num) / num
                w = np.full(num, (hi - lo) / num)
            elif rule == "gauss":
                t, w = np.polynomial.legendre.leggauss(num)
                x = 0.5 * (hi - lo) * (t + 1) + lo
                w = 0.5 * (hi - lo) * w
            else:
                if num < 3 or num % 2 == 0:
                    raise ContractError("composite Simpson needs an odd node count >= 3")
                eps = chart.singular_margin(fd_step) if chart.singular_distance is not None else 0.0
                x = np.linspace(lo + eps, hi - eps, num)
                h = x[1] - x[0]
                w = np.full(num, 2.0)
                w[1::2] = 4.0
                w[0] = w[-1] = 1.0
                w *= h / 3
            nodes.append(x)
            weights.append(w)
        self.axes = nodes
        self.axis_weights = weights
        mesh = np.meshgrid(*nodes, indexing="ij")
        self.points = np.stack(mesh, axis=-1)
        wmesh = np.meshgrid(*weights, indexing="ij")
        self.coord_weights = np.prod(np.stack(wmesh, axis=0), axis=0)
        self.weights = self.coord_weights * chart.weight(self.points)

    def __repr__(self):
        return f"PeriodicGrid({self.chart.name}, {self.points_per_axis}, rule={self.rule!r})"

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def shape(self) -> tuple:
        return tuple(self.points_per_axis)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def flat_points(self) -> Array:
        return self.points.reshape(-1, self.dim)

    @property
    def spacing(self) -> Array:
        return self.chart.extent / np.asarray(self.points_per_axis)

    @property
    def uniform(self) -> bool:
        return self.chart.fully_periodic

    def volume(self) -> float:
        return float(np.sum(self.weights))


def evaluate(func: Callable[[Array], Array], points: Array, chunk: int = 16384) -> Array:
    """Evaluate a vectorized point function over a lattice in chunks."""
    pts = np.asarray(points)
    lead = pts.shape[:-1]
    flat = pts.reshape(-1, pts.shape[-1])
    parts = [np.asarray(func(flat[i:i + chunk])) for i in range(0, len(flat), chunk)]
    out = np.concatenate(parts, axis=0)
    return out.reshape(lead + out.shape[1:])


def integrate(grid: PeriodicGrid, f) -> float:
    """``sum_nodes w * f`` for a scalar field, callable or array of node values."""
    if isinstance(f, TensorField) or callable(f):
        values = evaluate(f, grid.points)
    else:
        values = np.asarray(f, dtype=float)
    if values.shape != grid.shape:
        raise ContractError(f"integrand has shape {values.shape}, grid is {grid.shape}")
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise ValueError(f"non-finite integrand at node {idx}, x = {grid.points[idx]}")
    return float(np.sum(grid.weights * values))


class PeriodicDifferentiator:
    """First derivatives of node arrays on a fully periodic uniform grid.

    ``scheme="spectral"`` differentiates the trigonometric interpolant (the
    Nyquist mode is dropped); ``scheme="fd4"`` applies the 4th-order central
    stencil.  Arrays have the grid shape first and any trailing components.
    """

    def __init__(self, grid: PeriodicGrid, scheme: str = "spectral"):
        if not grid.uniform:
            raise UnsupportedError("periodic differentiation needs a fully periodic chart")
        if scheme not in ("spectral", "fd4"):
            raise ContractError(f"unknown differentiation scheme {scheme!r}")
        self.grid = grid
        self.scheme = scheme
        self.h = grid.spacing
        self._wave = []
        for num, h in zip(grid.shape, self.h):
            k = 2 * np.pi * np.fft.rfftfreq(num, d=h)
            if num % 2 == 0:
                k[-1] = 0.0
            self._wave.append(k)

    def diff(self, u: Array, axis: int) -> Array:
        u = np.asarray(u, dtype=float)
        if self.scheme == "spectral":
            num = self.grid.shape[axis]
            k = self._wave[axis].reshape((-1,) + (1,) * (u.ndim - axis - 1))
            uh = np.fft.rfft(u, axis=axis)
            return np.fft.irfft(1j * k * uh, n=num, axis=axis)
        h = self.h[axis]
        return (
            -np.roll(u, -2, axis) + 8 * np.roll(u, -1, axis) - 8 * np.roll(u, 1, axis) + np.roll(u, 2, axis)
        ) / (12 * h)

    def gradient(self, u: Array) -> Array:
        """Partials of a scalar (or component) array, derivative index last."""
        return np.stack([self.diff(u, a) for a in range(self.grid.dim)], axis=-1)

    def laplacian_symbol(self) -> Array:
        """Symbol of ``-sum_a D_a D_a`` on the full FFT lattice (for preconditioning)."""
        syms = []
        for num, h in zip(self.grid.shape, self.h):
            k = 2 * np.pi * np.fft.fftfreq(num, d=h)
            if self.scheme == "spectral":
                if num % 2 == 0:
                    k[num // 2] = 0.0
                syms.append(k**2)
            else:
                syms.append(((8 * np.sin(k * h) - np.sin(2 * k * h)) / (6 * h)) ** 2)
        mesh = np.meshgrid(*syms, indexing="ij")
        return np.sum(mesh, axis=0)

    def codiff_oneform(self, g_inv: Array, sqrt_det: Array, alpha: Array) -> Array:
        """``d* α = -(1/sqrt g) d_i (sqrt g g^{ij} α_j)`` on nodes."""
        flux = sqrt_det[..., None] * np.einsum("...ij,...j->...i", g_inv, alpha)
        div = sum(self.diff(flux[..., a], a) for a in range(self.grid.dim))
        return -div / sqrt_det


# ---------------------------------------------------------------------------
# cochain complex on the periodic cubical lattice


class CubicalDeRham:
    """Cellular cochains of the periodic cubical lattice.

    A ``k``-cochain is stored block-wise, one block of ``N`` node values per
    increasing axis subset ``I`` with ``|I| = k``.  The coboundary is purely
    combinatorial; the metric enters through diagonal Hodge stars.
    """

    def __init__(self, shape: Sequence[int], spacing: Sequence[float]):
        self.shape = tuple(int(s) for s in shape)
        self.spacing = np.asarray(spacing, dtype=float)
        self.n = len(self.shape)
        self.N = int(np.prod(self.shape))
        self.subsets = [list(itertools.combinations(range(self.n), k)) for k in range(self.n + 1)]
        self._diff = [self._forward_difference(a) for a in range(self.n)]

    def _forward_difference(self, axis: int) -> sp.csr_matrix:
        mats = []
        for a, num in enumerate(self.shape):
            if a == axis:
                mats.append(sp.diags([-np.ones(num), np.ones(num - 1), np.ones(1)], [0, 1, -(num - 1)], format="csr"))
            else:
                mats.append(sp.identity(num, format="csr"))
        out = mats[0]
        for m in mats[1:]:
            out = sp.kron(out, m, format="csr")
        return out

    def dim(self, k: int) -> int:
        return len(self.subsets[k]) * self.N

    def d(self, k: int) -> sp.csr_matrix:
        """Coboundary from ``k``- to ``(k+1)``-cochains."""
        rows = self.subsets[k + 1]
        cols = {s: i for i, s in enumerate(self.subsets[k])}
        blocks = [[None] * len(cols) for _ in rows]
        for r, J in enumerate(rows):
            for pos, a in enumerate(J):
                I = tuple(b for b in J if b != a)
                blocks[r][cols[I]] = (-1) ** pos * self._diff[a]
        return sp.bmat(blocks, format="csr")

    def cell_centers(self, k: int, origin: Sequence[float]) -> list:
        """Coordinates of the ``k``-cell centres, one ``(N, n)`` array per subset."""
        base = np.stack(
            np.meshgrid(*[origin[a] + self.spacing[a] * np.arange(s) for a, s in enumerate(self.shape)], indexing="ij"),
            axis=-1,
        ).reshape(-1, self.n)
        out = []
        for I in self.subsets[k]:
            shift = np.zeros(self.n)
            shift[list(I)] = 0.5 * self.spacing[list(I)]
            out.append(base + shift)
        return out

    def hodge_star(self, k: int, g: Optional[MetricField], origin: Sequence[float]) -> sp.dia_matrix:
        """Diagonal Hodge star on ``k``-cochains (exact for diagonal metrics)."""
        diag = []
        h = self.spacing
        for I, pts in zip(self.subsets[k], self.cell_centers(k, origin)):
            comp = [a for a in range(self.n) if a not in I]
            geo = np.prod(h[comp]) / np.prod(h[list(I)]) if I else np.prod(h)
            if g is None:
                factor = np.ones(len(pts))
            else:
                gx = evaluate(g, pts)
                sqrt_det = np.sqrt(np.linalg.det(gx))
                if I:
                    gi = np.linalg.inv(gx)[:, list(I)][:, :, list(I)]
                    factor = sqrt_det * np.linalg.det(gi)
                else:
                    factor = sqrt_det
            diag.append(geo * factor)
        return sp.diags(np.concatenate(diag))

    def codiff(self, k: int, stars: dict) -> sp.csr_matrix:
        """``d*`` from ``(k+1)``- to ``k``-cochains: ``M_k^{-1} d_k^T M_{k+1}``."""
        inv = sp.diags(1.0 / stars[k].diagonal())
        return (inv @ self.d(k).T @ stars[k + 1]).tocsr()


def hodge_laplacian_1forms(grid: PeriodicGrid, g: Optional[MetricField] = None):
    """Stiffness ``K`` and mass ``M`` of the 1-form Hodge Laplacian (``K v = mu M v``).

    ``K = d1^T M2 d1 + M1 d0 M0^{-1} d0^T M1`` is symmetric positive
    semidefinite; its kernel is the space of discrete harmonic 1-forms.
    """
    if not grid.uniform:
        raise UnsupportedError("b1 estimation is restricted to torus-type charts")
    cx = CubicalDeRham(grid.shape, grid.spacing)
    origin = grid.chart.lower
    stars = {k: cx.hodge_star(k, g, origin) for k in range(min(3, cx.n + 1))}
    d0 = cx.d(0)
    m0inv = sp.diags(1.0 / stars[0].diagonal())
    m1 = stars[1]
    stiff = m1 @ d0 @ m0inv @ d0.T @ m1
    if cx.n >= 2:
        d1 = cx.d(1)
        stiff = stiff + d1.T @ stars[2] @ d1
    return sp.csc_matrix(stiff), sp.csc_matrix(m1), cx


@dataclass
class B1Estimate:
    """Outcome of a spectral first-Betti-number estimate."""

    count: Optional[int]
    spectrum_head: list
    gap_ratio: float
    tol_harmonic: float
    status: str = "determinate"
    notes: list = field(default_factory=list)

    @property
    def determinate(self) -> bool:
        return self.status == "determinate"


def b1_estimate(
    grid: PeriodicGrid,
    g: Optional[MetricField] = None,
    n_eigs: int = 10,
    tol_harmonic: Optional[float] = None,
    min_gap: float = 10.0,
) -> B1Estimate:
    """Count discrete harmonic 1-forms on a torus grid.

    The count is reported only when the smallest non-harmonic eigenvalue
    exceeds ``min_gap`` times the harmonic threshold and the largest harmonic
    eigenvalue; otherwise the result is ``"indeterminate"``.
    """
    stiff, mass, cx = hodge_laplacian_1forms(grid, g)
    ref = float(np.min((2 * np.pi / grid.chart.extent) ** 2))
    if tol_harmonic is None:
        tol_harmonic = 1e-6 * ref
    k = min(n_eigs, stiff.shape[0] - 2)
    v0 = np.random.default_rng(0).standard_normal(stiff.shape[0])  # fixed start: ARPACK's default is random
    vals = spla.eigsh(stiff, k=k, M=mass, sigma=-0.5 * ref, which="LM", v0=v0, return_eigenvectors=False)
    vals = np.sort(vals)
    harmonic = vals < tol_harmonic
    count = int(np.sum(harmonic))
    notes = []
    if count >= k:
        return B1Estimate(None, vals.tolist(), 0.0, tol_harmonic, "indeterminate", ["all computed eigenvalues harmonic"])
    floor = max(tol_harmonic, float(vals[count - 1]) if count else 0.0)
    gap = float(vals[count]) / floor
    status = "determinate"
    if gap < min_gap or not np.all(vals[:count] < vals[count]):
        status = "indeterminate"
        notes.append(f"spectral gap ratio {gap:.3g} below {min_gap}")
    return B1Estimate(count if status == "determinate" else None, vals.tolist(), gap, tol_harmonic, status, notes)
