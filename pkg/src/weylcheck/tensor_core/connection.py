"""Affine connections, covariant derivatives and curvature.

Conventions (fixed everywhere in the package):

* ``Gamma[..., k, i, j]`` is the component ``k`` of ``nabla_{d_i} d_j``.
* ``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X, Y]``; the curvature array
  ``R[..., l, k, i, j]`` is component ``l`` of ``R(d_i, d_j) d_k``.
* ``ricci(X, Y) = trace(Z -> R(Z, X) Y)``, i.e. ``Ric[a, b] = R[l, b, l, a]``.
* Covariant derivatives append the direction index last:
  ``nabla T[..., comps, i] = (nabla_{d_i} T)_{comps}``.
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from ..errors import ContractError
from .fields import Array, ChartDomain, MetricField, TensorField, fd_jacobian


class AffineConnection:
    """Connection coefficients with an attached derivative strategy."""

    def __init__(
        self,
        coeffs: Callable[[Array], Array],
        chart: ChartDomain,
        dcoeffs: Optional[Callable[[Array], Array]] = None,
        torsion_free: bool = True,
        fd_step: float = 1e-3,
        name: str = "",
    ):
        self.coeffs = coeffs
        self.chart = chart
        self._dcoeffs = dcoeffs
        self.torsion_free = torsion_free
        self.fd_step = fd_step
        self.name = name

    def __repr__(self):
        return f"AffineConnection({self.name or '?'}, torsion_free={self.torsion_free})"

    @property
    def dim(self) -> int:
        return self.chart.dim

    def __call__(self, x: Array) -> Array:
        return np.asarray(self.coeffs(np.asarray(x, dtype=float)), dtype=float)

    def derivative(self, x: Array) -> Array:
        """``d_m Gamma^k_ij`` with ``m`` as the last axis."""
        if self._dcoeffs is not None:
            return np.asarray(self._dcoeffs(np.asarray(x, dtype=float)), dtype=float)
        return fd_jacobian(self, x, self.chart.fd_steps(self.fd_step))

    def torsion(self, x: Array) -> Array:
        gam = self(x)
        return gam - np.swapaxes(gam, -1, -2)

    def covariant(self, field_: TensorField, x: Array) -> Array:
        """Covariant derivative of an ``(r, s)`` field, direction index last."""
        return covariant_derivative(self(x), field_(x), field_.jac(x), field_.valence)

    def shifted(self, delta: Callable[[Array], Array], ddelta=None, torsion_free=False, name="") -> "AffineConnection":
        """The connection ``Gamma + delta`` (``delta`` a (1,2)-tensor of coefficients)."""
        base = self

        def coeffs(x):
            return base(x) + delta(x)

        dco = None
        if ddelta is not None and base._dcoeffs is not None:
            def dco(x):
                return base.derivative(x) + ddelta(x)

        return AffineConnection(coeffs, self.chart, dco, torsion_free, self.fd_step, name)


def covariant_derivative(gamma: Array, comps: Array, partials: Array, valence: tuple) -> Array:
    """``nabla_i T`` from coefficients, components and partial derivatives.

    ``partials[..., comps, i]`` is ``d_i T``; the result has the same layout.
    """
    r, s = valence
    rank = r + s
    out = np.array(partials, dtype=float, copy=True)
    batch = comps.ndim - rank
    for slot in range(rank):
        # move the slot to the end, contract, and move back
        moved = np.moveaxis(comps, batch + slot, -1)  # (..., other comps, c)
        if slot < r:
            term = _contract_up(gamma, moved)  # + Gamma^a_{i c} T^{..c..}
        else:
            term = _contract_down(gamma, moved)  # - Gamma^c_{i b} T_{..c..}
        # term layout: (..., other comps, a, i) -> put a back at slot
        term = np.moveaxis(term, -2, batch + slot)
        out = out + term if slot < r else out - term
    return out


def _contract_up(gamma, moved):
    # moved: (B..., O..., c); gamma: (B..., a, i, c) -> (B..., O..., a, i)
    batch = gamma.ndim - 3
    n_other = moved.ndim - batch - 1
    g = gamma.reshape(gamma.shape[:batch] + (1,) * n_other + gamma.shape[batch:])
    return np.einsum("...aic,...c->...ai", g, moved)


def _contract_down(gamma, moved):
    # Gamma^c_{i b} T_{..c..}: gamma (B..., c, i, b) -> (B..., O..., b, i)
    batch = gamma.ndim - 3
    n_other = moved.ndim - batch - 1
    g = gamma.reshape(gamma.shape[:batch] + (1,) * n_other + gamma.shape[batch:])
    return np.einsum("...cib,...c->...bi", g, moved)


def christoffel(g: Array, ginv: Array, dg: Array) -> Array:
    """Levi-Civita coefficients from metric, inverse and first partials."""
    lower = 0.5 * (
        np.einsum("...jli->...lij", dg) + np.einsum("...ilj->...lij", dg) - np.einsum("...ijl->...lij", dg)
    )
    return np.einsum("...kl,...lij->...kij", ginv, lower)


def levi_civita(g: MetricField) -> AffineConnection:
    """Levi-Civita connection of ``g``; derivatives from the metric's second partials."""

    def coeffs(x):
        return christoffel(g.checked(x), g.inverse(x), g.jac(x))

    def dcoeffs(x):
        ginv = g.inverse(x)
        dg = g.jac(x)
        ddg = g.hess(x)
        lower = 0.5 * (
            np.einsum("...jli->...lij", dg) + np.einsum("...ilj->...lij", dg) - np.einsum("...ijl->...lij", dg)
        )
        dlower = 0.5 * (
            np.einsum("...jlim->...lijm", ddg)
            + np.einsum("...iljm->...lijm", ddg)
            - np.einsum("...ijlm->...lijm", ddg)
        )
        dginv = -np.einsum("...ac,...cdm,...db->...abm", ginv, dg, ginv)
        return np.einsum("...klm,...lij->...kijm", dginv, lower) + np.einsum("...kl,...lijm->...kijm", ginv, dlower)

    return AffineConnection(coeffs, g.chart, dcoeffs, torsion_free=True, fd_step=g.fd_step, name=f"LC({g.name})")


def curvature(conn: AffineConnection, x: Array, check: bool = True) -> Array:
    """Curvature ``R[..., l, k, i, j]`` of ``conn`` at ``x``.

    Antisymmetry in ``(i, j)`` holds exactly because the array is assembled
    as ``A - A^T`` over the last two axes.
    """
    x = np.asarray(x, dtype=float)
    if check:
        conn.chart.check_regular(x, conn.fd_step)
    gam = conn(x)
    dgam = conn.derivative(x)  # [l, j, k, i] = d_i Gamma^l_jk
    a = np.einsum("...ljki->...lkij", dgam) + np.einsum("...lim,...mjk->...lkij", gam, gam)
    return a - np.swapaxes(a, -1, -2)


def ricci_from_curvature(riem: Array) -> Array:
    return np.einsum("...lbla->...ab", riem)


def ricci(conn: AffineConnection, x: Array, check: bool = True) -> Array:
    """``Ric(X, Y) = trace(Z -> R(Z, X) Y)``."""
    return ricci_from_curvature(curvature(conn, x, check))


def first_bianchi(riem: Array) -> Array:
    """``R(X,Y)Z + R(Y,Z)X + R(Z,X)Y`` as ``B[l, k, i, j]`` (k=Z, i=X, j=Y)."""
    return riem + np.einsum("...lijk->...lkij", riem) + np.einsum("...ljki->...lkij", riem)


def lower_first(g: Array, riem: Array) -> Array:
    """``Rm[a, k, i, j] = g_al R^l_kij``."""
    return np.einsum("...al,...lkij->...akij", g, riem)


def sectional_curvature(g: Array, riem: Array, u: Array, v: Array) -> Array:
    """``g(R(u,v)v, u) / (|u|^2|v|^2 - g(u,v)^2)``."""
    num = np.einsum("...al,...lkij,...a,...i,...j,...k->...", g, riem, u, u, v, v)
    uu = np.einsum("...a,...ab,...b->...", u, g, u)
    vv = np.einsum("...a,...ab,...b->...", v, g, v)
    uv = np.einsum("...a,...ab,...b->...", u, g, v)
    return num / (uu * vv - uv**2)


def scalar_curvature(g_inv: Array, ric: Array) -> Array:
    return np.einsum("...ab,...ab->...", g_inv, ric)


def metric_compatibility(conn: AffineConnection, g: MetricField, x: Array) -> Array:
    """``nabla g`` components; vanish for metric connections."""
    return covariant_derivative(conn(x), g(x), g.jac(x), (0, 2))


def check_valence(field_: TensorField, valence: tuple, what: str = "field") -> None:
    if tuple(field_.valence) != tuple(valence):
        raise ContractError(f"{what} must have valence {valence}, got {field_.valence}")
