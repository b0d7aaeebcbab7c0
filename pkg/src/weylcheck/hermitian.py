"""Hermitian-Weyl structures, the Chern connection and Hodge-number arithmetic.

Conventions: ``J[..., a, i] = J^a_i``; the Kähler form is
``Ω(X, Y) = g(X, JY)``; on 1-forms ``Jα = -α∘J``.  The Chern correction term
``½ dΩ(JX, Y, Z)`` is taken with the sign that makes ``∇^C J = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ContractError, InconsistentHodgeData, PreconditionError, UnsupportedError
from .tensor_core.connection import (
    AffineConnection,
    covariant_derivative,
    curvature,
    levi_civita,
    ricci_from_curvature,
)
from .tensor_core.fields import Array, ChartDomain, MetricField, TensorField, gram_schmidt, relative_eigvalsh
from .tensor_core.forms import codiff_components, d_components, inner_components, tensor_norm2, wedge_components
from .weyl import WeylStructure, ricci_weyl_formula, riemannian_data, weyl_connection


def _jdual(j: Array, alpha: Array) -> Array:
    return -np.einsum("...a,...ai->...i", alpha, j)


class HermitianStructure:
    """Metric plus compatible almost-complex structure on a chart of even dimension.

    ``theta`` overrides the computed Lee form in :meth:`weyl_structure` (used
    by catalog entries that carry a closed form); :func:`lee_form` always
    computes it from ``Ω``.
    """

    def __init__(
        self,
        chart: ChartDomain,
        g: MetricField,
        J: TensorField,
        name: str = "",
        theta: Optional[TensorField] = None,
    ):
        if chart.dim % 2:
            raise ContractError(f"Hermitian structure needs an even-dimensional chart, got {chart.dim}")
        if J.valence != (1, 1):
            raise ContractError(f"J must have valence (1, 1), got {J.valence}")
        self.chart = chart
        self.g = g
        self.J = J
        self.name = name
        self._theta = theta

    @property
    def m(self) -> int:
        return self.chart.dim // 2

    @property
    def omega(self) -> TensorField:
        g, J = self.g, self.J

        def func(x):
            return np.einsum("...ia,...aj->...ij", g(x), J(x))

        def jac(x):
            return np.einsum("...iam,...aj->...ijm", g.jac(x), J(x)) + np.einsum("...ia,...ajm->...ijm", g(x), J.jac(x))

        def hess(x):
            return (
                np.einsum("...iamp,...aj->...ijmp", g.hess(x), J(x))
                + np.einsum("...iam,...ajp->...ijmp", g.jac(x), J.jac(x))
                + np.einsum("...iap,...ajm->...ijmp", g.jac(x), J.jac(x))
                + np.einsum("...ia,...ajmp->...ijmp", g(x), J.hess(x))
            )

        return TensorField(func, (0, 2), self.chart, jac=jac, hess=hess, fd_step=g.fd_step, name=f"Omega({self.name})")

    @property
    def theta(self) -> TensorField:
        if self._theta is not None:
            return self._theta
        return self.lee_field()

    def lee_field(self) -> TensorField:
        """The computed Lee form as a field (partials by finite differences)."""
        return TensorField(lambda x: lee_form(self, x), (0, 1), self.chart, fd_step=self.g.fd_step, name=f"lee({self.name})")

    def weyl_structure(self, exactness: str = "closed-non-exact") -> WeylStructure:
        return WeylStructure(self.chart, self.g, self.theta, exactness, name=self.name)

    def structure_residuals(self, x: Array) -> dict:
        """``J^2 + 1``, ``g(J., J.) - g`` and ``Ω + Ω^T`` (max abs per point)."""
        j = self.J(x)
        gx = self.g(x)
        n = self.chart.dim
        om = np.einsum("...ia,...aj->...ij", gx, j)
        return {
            "J_squared": np.max(np.abs(j @ j + np.eye(n)), axis=(-1, -2)),
            "compatibility": np.max(np.abs(np.einsum("...ai,...ab,...bj->...ij", j, gx, j) - gx), axis=(-1, -2)),
            "omega_antisymmetry": np.max(np.abs(om + np.swapaxes(om, -1, -2)), axis=(-1, -2)),
        }


def standard_complex_structure(chart: ChartDomain) -> TensorField:
    """Constant ``J d/dx_{2a} = d/dx_{2a+1}`` on an even-dimensional chart."""
    n = chart.dim
    j = np.zeros((n, n))
    for a in range(0, n, 2):
        j[a + 1, a] = 1.0
        j[a, a + 1] = -1.0

    def func(x):
        return np.broadcast_to(j, np.asarray(x).shape[:-1] + (n, n)).copy()

    zeros1 = lambda x: np.zeros(np.asarray(x).shape[:-1] + (n, n, n))  # noqa: E731
    zeros2 = lambda x: np.zeros(np.asarray(x).shape[:-1] + (n, n, n, n))  # noqa: E731
    return TensorField(func, (1, 1), chart, jac=zeros1, hess=zeros2, name="J0")


def lee_form(h: HermitianStructure, x: Array) -> Array:
    """``θ = -(1/(m-1)) J d*Ω`` at ``x``."""
    m = h.m
    if m < 2:
        raise UnsupportedError("the Lee form formula needs complex dimension m >= 2")
    x = np.asarray(x, dtype=float)
    om = h.omega
    gi = h.g.inverse(x)
    gam = levi_civita(h.g)(x)
    dstar = codiff_components(gi, gam, om(x), om.jac(x), 2)
    return -_jdual(h.J(x), dstar) / (m - 1)


def lck_residual(h: HermitianStructure, x: Array) -> tuple:
    """``(max |dΩ - θ∧Ω|, max |dθ|)`` per point, with ``θ`` the computed Lee form."""
    x = np.asarray(x, dtype=float)
    om = h.omega
    domega = d_components(om.jac(x), 2)
    theta_f = h.lee_field()
    th = theta_f(x)
    res = np.max(np.abs(domega - wedge_components(th, 1, om(x), 2)), axis=(-1, -2, -3))
    dth = np.max(np.abs(d_components(theta_f.jac(x), 1)), axis=(-1, -2))
    return res, dth


def _d_omega(h: HermitianStructure, x: Array) -> Array:
    return d_components(h.omega.jac(x), 2)


def chern_connection(h: HermitianStructure) -> AffineConnection:
    """``g(∇^C_X Y, Z) = g(∇_X Y, Z) + ½ dΩ(JX, Y, Z)``; derivatives by finite differences."""
    lc = levi_civita(h.g)

    def coeffs(x):
        corr = 0.5 * np.einsum("...lk,...ai,...ajk->...lij", h.g.inverse(x), h.J(x), _d_omega(h, x))
        return lc(x) + corr

    return AffineConnection(coeffs, h.chart, None, False, h.g.fd_step, f"C({h.name})")


def chern_via_weyl(h: HermitianStructure) -> AffineConnection:
    """``∇^C = ∇^W + ½ θ⊗Id + ½ Jθ⊗J`` (valid for Hermitian-Weyl structures)."""
    w = h.weyl_structure()
    wc = weyl_connection(w)
    n = h.chart.dim
    eye = np.eye(n)

    def coeffs(x):
        th = w.theta(x)
        j = h.J(x)
        return wc(x) + 0.5 * np.einsum("...i,kj->...kij", th, eye) + 0.5 * np.einsum("...i,...kj->...kij", _jdual(j, th), j)

    return AffineConnection(coeffs, h.chart, None, False, h.g.fd_step, f"C~W({h.name})")


def chern_compatibility(h: HermitianStructure, x: Array) -> dict:
    """Max components of ``∇^C g``, ``∇^C J`` and of the difference of the two Chern routes."""
    chern = chern_connection(h)
    gam = chern(x)
    nab_g = covariant_derivative(gam, h.g(x), h.g.jac(x), (0, 2))
    nab_j = covariant_derivative(gam, h.J(x), h.J.jac(x), (1, 1))
    return {
        "metric": np.max(np.abs(nab_g), axis=(-1, -2, -3)),
        "complex": np.max(np.abs(nab_j), axis=(-1, -2, -3)),
        "two_route": np.max(np.abs(gam - chern_via_weyl(h)(x)), axis=(-1, -2, -3)),
    }


@dataclass
class ChernReport:
    """``k^C`` and the residuals of the Chern-Weyl curvature relations (per point)."""

    kc: Array
    kc_frame_alt: Array
    kc_trace: Array
    frame_residual: Array
    curvature_relation_residual: Array
    kc_relation_residual: Array
    ric_w: Array
    theta: Array = field(repr=False, default=None)
    d_jtheta: Array = field(repr=False, default=None)
    omega: Array = field(repr=False, default=None)
    g: Array = field(repr=False, default=None)

    def __iter__(self):
        yield self.kc
        yield self.curvature_relation_residual
        yield self.kc_relation_residual


def _kc_from_frame(g, j, riem_c, frame):
    # R^C(Ω)(X, Y) = ½ Σ_i g(R^C(e_i, J e_i) X, Y); k^C(X, Y) = R^C(Ω)(JX, Y)
    je = np.einsum("...ab,...ib->...ia", j, frame)
    rco = 0.5 * np.einsum("...yl,...lkab,...ia,...ib->...ky", g, riem_c, frame, je)
    return np.einsum("...kx,...ky->...xy", j, rco)


def chern_k(h: HermitianStructure, x: Array, lck_tol: float = 1e-5) -> ChernReport:
    """``k^C`` from the Chern curvature, plus the curvature-relation residuals.

    ``k^C`` is evaluated with Gram-Schmidt frames in two coordinate orders and
    with the frame-free trace ``½ g^{ac} J^b_c g(R^C(d_a, d_b) X, Y)``.
    """
    x = np.asarray(x, dtype=float)
    res, _ = lck_residual(h, x)
    worst = float(np.max(res))
    if worst > lck_tol:
        raise PreconditionError(f"structure {h.name!r} is not Hermitian-Weyl: |dΩ - θ∧Ω| = {worst:.3e} > {lck_tol:.1e}")
    n = h.chart.dim
    gx = h.g(x)
    gi = np.linalg.inv(gx)
    j = h.J(x)
    riem_c = curvature(chern_connection(h), x)
    frame = gram_schmidt(gx)
    frame_alt = gram_schmidt(gx, list(range(n))[::-1])
    kc = _kc_from_frame(gx, j, riem_c, frame)
    kc_alt = _kc_from_frame(gx, j, riem_c, frame_alt)
    rco_trace = 0.5 * np.einsum("...yl,...lkab,...ac,...bc->...ky", gx, riem_c, gi, j)
    kc_trace = np.einsum("...kx,...ky->...xy", j, rco_trace)

    w = h.weyl_structure()
    theta_f = w.theta
    th = theta_f(x)
    dth = theta_f.jac(x)
    riem_w = curvature(weyl_connection(w), x)
    jth_jac = -np.einsum("...am,...ai->...im", dth, j) - np.einsum("...a,...aim->...im", th, h.J.jac(x))
    d_jth = d_components(jth_jac, 1)
    d_th = d_components(dth, 1)
    predicted = riem_w + 0.5 * np.einsum("...ij,...lk->...lkij", d_jth, j) + 0.5 * np.einsum(
        "...ij,lk->...lkij", d_th, np.eye(n)
    )
    ric_w = ricci_weyl_formula(n, riemannian_data(w, x))
    om = np.einsum("...ia,...aj->...ij", gx, j)
    pairing = inner_components(gi, d_jth, om, 2)
    kc_pred = ric_w + 0.5 * pairing[..., None, None] * gx
    return ChernReport(
        kc=kc,
        kc_frame_alt=kc_alt,
        kc_trace=kc_trace,
        frame_residual=np.maximum(
            np.max(np.abs(kc - kc_alt), axis=(-1, -2)), np.max(np.abs(kc - kc_trace), axis=(-1, -2))
        ),
        curvature_relation_residual=np.max(np.abs(riem_c - predicted), axis=(-1, -2, -3, -4)),
        kc_relation_residual=np.max(np.abs(kc - kc_pred), axis=(-1, -2)),
        ric_w=ric_w,
        theta=th,
        d_jtheta=d_jth,
        omega=om,
        g=gx,
    )


@dataclass
class HopfStructureReport:
    """Residuals of the parallel-Lee-form identities (per point).

    ``lee_differential_residual``: ``|d(Jθ) - |θ|^2 Ω - θ∧Jθ|``.
    ``kc_formula_residual``: ``|k^C - Ric^W - (m-1)|θ|^2 g|``.
    ``kc_min_eig``: smallest eigenvalue of ``k^C`` relative to ``g``.
    ``observed_coefficient``: ``c`` in ``k^C - Ric^W = c |θ|^2 g`` fitted per point.
    """

    lee_differential_residual: Array
    kc_formula_residual: Array
    kc_min_eig: Array
    observed_coefficient: Array
    nabla_theta: Array

    def __iter__(self):
        yield self.lee_differential_residual
        yield self.kc_formula_residual
        yield self.kc_min_eig


def gh_structure_residuals(h: HermitianStructure, x: Array, parallel_tol: float = 1e-5) -> HopfStructureReport:
    """Identities for Hermitian-Weyl structures with Levi-Civita-parallel Lee form."""
    x = np.asarray(x, dtype=float)
    w = h.weyl_structure()
    rd = riemannian_data(w, x)
    nab = np.sqrt(np.maximum(tensor_norm2(rd.g, rd.ginv, rd.nabla_theta, (0, 2)), 0.0))
    worst = float(np.max(nab))
    if worst > parallel_tol:
        raise PreconditionError(f"Lee form of {h.name!r} is not parallel: |∇θ| = {worst:.3e} > {parallel_tol:.1e}")
    rep = chern_k(h, x)
    m = h.m
    th = rep.theta
    jth = _jdual(h.J(x), th)
    th2 = rd.theta_norm2
    lee_res = rep.d_jtheta - th2[..., None, None] * rep.omega - wedge_components(th, 1, jth, 1)
    diff = rep.kc - rep.ric_w
    kc_res = diff - (m - 1) * th2[..., None, None] * rep.g
    n = h.chart.dim
    coef = np.einsum("...ab,...ab->...", rd.ginv, diff) / (n * np.where(th2 > 0, th2, np.nan))
    return HopfStructureReport(
        lee_differential_residual=np.max(np.abs(lee_res), axis=(-1, -2)),
        kc_formula_residual=np.max(np.abs(kc_res), axis=(-1, -2)),
        kc_min_eig=relative_eigvalsh(rep.kc, rep.g)[..., 0],
        observed_coefficient=coef,
        nabla_theta=nab,
    )


@dataclass
class HodgeProfile:
    """Hodge numbers forced by the parallel-Lee-form relations and Serre duality.

    ``h_p0[p-1] = h^{p,0}`` and ``h_0q[q-1] = h^{0,q}`` for ``p, q = 1..m``.
    """

    m: int
    h_p0: list
    b1: int
    h_0q: list
    labels: dict = field(default_factory=dict)


VANISHING_LABEL = "by cited vanishing theorem"


def hodge_relations(m: int, h_p0: Sequence[Optional[int]], b1_hint: Optional[int] = None) -> HodgeProfile:
    """Complete ``(h^{p,0}, b1, h^{0,q})`` on a compact generalized Hopf manifold.

    Relations used: ``2h^{1,0} = b1 - 1``, ``h^{0,1} = h^{1,0} + 1``,
    ``h^{0,p} = h^{p,0} + h^{p-1,0}`` for ``2 <= p <= m-1``,
    ``h^{m,0} = h^{m-1,0}`` and ``h^{0,m} = h^{m,0}`` (Serre duality).  Missing
    ``h^{p,0}`` entries may be ``None`` and are filled where forced.  Raises
    :class:`InconsistentHodgeData` on any contradiction, including even ``b1``.
    """
    if m < 2:
        raise UnsupportedError("the relations are stated for complex dimension m >= 2")
    h = list(h_p0) + [None] * (m - len(h_p0))
    if len(h) != m:
        raise ContractError(f"expected at most {m} entries h^{{p,0}}, got {len(h_p0)}")
    for p, v in enumerate(h, start=1):
        if v is not None and (int(v) != v or v < 0):
            raise ContractError(f"h^{{{p},0}} must be a non-negative integer, got {v!r}")
    h = [None if v is None else int(v) for v in h]

    if b1_hint is not None:
        if (b1_hint - 1) % 2:
            raise InconsistentHodgeData(
                f"b1 = {b1_hint} would need 2 h^{{1,0}} = {b1_hint - 1}, which is odd: b1 must be odd"
            )
        forced = (b1_hint - 1) // 2
        if forced < 0:
            raise InconsistentHodgeData(f"b1 = {b1_hint} gives negative h^{{1,0}}")
        if h[0] is not None and h[0] != forced:
            raise InconsistentHodgeData(f"b1 = {b1_hint} forces h^{{1,0}} = {forced}, but {h[0]} was given")
        h[0] = forced
    # h^{m,0} = h^{m-1,0}
    if h[m - 1] is None and h[m - 2] is not None:
        h[m - 1] = h[m - 2]
    elif h[m - 2] is None and h[m - 1] is not None:
        h[m - 2] = h[m - 1]
    elif h[m - 1] is not None and h[m - 1] != h[m - 2]:
        raise InconsistentHodgeData(f"h^{{{m},0}} = {h[m - 1]} must equal h^{{{m - 1},0}} = {h[m - 2]}")
    if h[0] is None:
        raise ContractError("h^{1,0} (or a b1 hint) is required")
    if any(v is None for v in h):
        missing = [p for p, v in enumerate(h, start=1) if v is None]
        raise ContractError(f"h^{{p,0}} for p in {missing} is not forced by the relations")

    b1 = 2 * h[0] + 1
    h0q = [h[0] + 1]
    for p in range(2, m):
        h0q.append(h[p - 1] + h[p - 2])
    h0q.append(h[m - 1])
    return HodgeProfile(m=m, h_p0=h, b1=b1, h_0q=h0q)


def vanishing_profile(m: int, kc_min_eig: float, tol: float = 1e-8) -> Optional[HodgeProfile]:
    """Profile with ``h^{p,0} = 0`` when ``k^C > 0`` everywhere, else ``None``.

    The vanishing of holomorphic forms under ``k^C > 0`` is an external result
    that is trusted here, not computed; the entries are labeled accordingly.
    """
    if kc_min_eig <= tol:
        return None
    prof = hodge_relations(m, [0] * m)
    prof.labels = {f"h^{p},0": VANISHING_LABEL for p in range(1, m + 1)}
    return prof
