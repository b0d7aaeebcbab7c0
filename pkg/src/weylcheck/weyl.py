"""Weyl structures: connection, Ricci tensor, positivity, gauge and Bochner identities.

A Weyl structure is stored as a pair ``(g, theta)`` with
``nabla^W g = theta ⊗ g``.  Conformal changes act by
``(g, theta) -> (e^{2f} g, theta + 2 df)``, the unique law that keeps the
connection fixed.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.sparse.linalg as spla

from .discrete import PeriodicDifferentiator, PeriodicGrid, evaluate
from .errors import ContractError, PreconditionError, SolverError, UnsupportedError
from .tensor_core.connection import (
    AffineConnection,
    covariant_derivative,
    curvature,
    levi_civita,
    ricci_from_curvature,
)
from .tensor_core.fields import Array, ChartDomain, MetricField, TensorField, conformal_metric, relative_eigvalsh
from .tensor_core.forms import codiff_components, d_components, inner_components, tensor_norm2
from .tensor_core.trig import TrigField

EXACTNESS = ("exact", "closed-non-exact", "non-closed")


@dataclass(frozen=True)
class WeylStructure:
    """Metric representative plus the 1-form of a Weyl connection."""

    chart: ChartDomain
    g: MetricField
    theta: TensorField
    exactness: str = "closed-non-exact"
    name: str = ""

    def __post_init__(self):
        if self.theta.valence != (0, 1):
            raise ContractError(f"theta must be a 1-form, got valence {self.theta.valence}")
        if self.exactness not in EXACTNESS:
            raise ContractError(f"exactness tag must be one of {EXACTNESS}")

    @property
    def n(self) -> int:
        return self.chart.dim


def _shift_tensor(theta: Array, g: Array, ginv: Array, a: float, b: float, c: float) -> Array:
    """``a θ_i δ^k_j + b θ_j δ^k_i + c g_ij θ^k`` as ``[..., k, i, j]``."""
    n = theta.shape[-1]
    eye = np.eye(n)
    theta_up = np.einsum("...kl,...l->...k", ginv, theta)
    out = a * np.einsum("...i,kj->...kij", theta, eye)
    out = out + b * np.einsum("...j,ki->...kij", theta, eye)
    return out + c * np.einsum("...ij,...k->...kij", g, theta_up)


def _shift_tensor_derivative(theta, dtheta, g, dg, ginv, dginv, a, b, c):
    n = theta.shape[-1]
    eye = np.eye(n)
    theta_up = np.einsum("...kl,...l->...k", ginv, theta)
    dtheta_up = np.einsum("...klm,...l->...km", dginv, theta) + np.einsum("...kl,...lm->...km", ginv, dtheta)
    out = a * np.einsum("...im,kj->...kijm", dtheta, eye)
    out = out + b * np.einsum("...jm,ki->...kijm", dtheta, eye)
    out = out + c * (np.einsum("...ijm,...k->...kijm", dg, theta_up) + np.einsum("...ij,...km->...kijm", g, dtheta_up))
    return out


def _shifted_connection(w: WeylStructure, a, b, c, torsion_free, name) -> AffineConnection:
    lc = levi_civita(w.g)
    g, th = w.g, w.theta

    def coeffs(x):
        return lc(x) + _shift_tensor(th(x), g(x), g.inverse(x), a, b, c)

    def dcoeffs(x):
        delta = _shift_tensor_derivative(
            th(x), th.jac(x), g(x), g.jac(x), g.inverse(x), g.inverse_jac(x), a, b, c
        )
        return lc.derivative(x) + delta

    return AffineConnection(coeffs, w.chart, dcoeffs, torsion_free, w.g.fd_step, name)


def weyl_connection(w: WeylStructure) -> AffineConnection:
    """``nabla^W_X Y = nabla_X Y - θ(X)Y/2 - θ(Y)X/2 + g(X,Y)θ^#/2``."""
    return _shifted_connection(w, -0.5, -0.5, 0.5, True, f"W({w.name})")


def tilde_connection(w: WeylStructure) -> AffineConnection:
    """``nabla~_X Y = nabla_X Y - (n-2)/4 (θ(X)Y - g(X,Y)θ^#)``; carries torsion in general."""
    q = (w.n - 2) / 4.0
    return _shifted_connection(w, -q, 0.0, q, w.n == 2, f"tilde({w.name})")


@dataclass
class RiemannianData:
    """Levi-Civita quantities at a batch of points."""

    g: Array
    ginv: Array
    gamma: Array
    riemann: Array
    ricci: Array
    scalar: Array
    theta: Array
    nabla_theta: Array  # [..., b, i] = nabla_i theta_b
    codiff_theta: Array
    theta_norm2: Array
    dtheta: Array


def riemannian_data(w: WeylStructure, x: Array, check: bool = True) -> RiemannianData:
    lc = levi_civita(w.g)
    gx = w.g.checked(x)
    gi = np.linalg.inv(gx)
    gam = lc(x)
    riem = curvature(lc, x, check=check)
    ric = ricci_from_curvature(riem)
    th = w.theta(x)
    dth = w.theta.jac(x)
    nab = covariant_derivative(gam, th, dth, (0, 1))
    return RiemannianData(
        g=gx,
        ginv=gi,
        gamma=gam,
        riemann=riem,
        ricci=ric,
        scalar=np.einsum("...ab,...ab->...", gi, ric),
        theta=th,
        nabla_theta=nab,
        codiff_theta=-np.einsum("...ib,...bi->...", gi, nab),
        theta_norm2=np.einsum("...a,...ab,...b->...", th, gi, th),
        dtheta=d_components(dth, 1),
    )


def ricci_weyl_formula(n: int, rd: RiemannianData) -> Array:
    """Symmetric Weyl-Ricci tensor from Levi-Civita data (polarized quadratic form)."""
    sym_nab = 0.5 * (rd.nabla_theta + np.swapaxes(rd.nabla_theta, -1, -2))
    pinch = rd.theta_norm2[..., None, None] * rd.g - np.einsum("...a,...b->...ab", rd.theta, rd.theta)
    return (
        0.5 * (rd.ricci + np.swapaxes(rd.ricci, -1, -2))
        + 0.5 * (n - 2) * sym_nab
        - 0.25 * (n - 2) * pinch
        - 0.5 * rd.codiff_theta[..., None, None] * rd.g
    )


def conformal_scalar_formula(n: int, rd: RiemannianData) -> Array:
    """``k = s - (n-1) d*θ - (n-1)(n-2)/4 |θ|^2``."""
    return rd.scalar - (n - 1) * rd.codiff_theta - 0.25 * (n - 1) * (n - 2) * rd.theta_norm2


def positivity_form(n: int, ric_w: Array, rd: RiemannianData) -> Array:
    """``Ric^W - (n-2)(n-4)/8 (|θ|^2 g - θ⊗θ)``; nonnegativity is the Bochner hypothesis."""
    pinch = rd.theta_norm2[..., None, None] * rd.g - np.einsum("...a,...b->...ab", rd.theta, rd.theta)
    return ric_w - (n - 2) * (n - 4) / 8.0 * pinch


def _rel(a: Array, b: Array) -> Array:
    """Per-point max-abs difference relative to ``max(|b|, 1)``."""
    rank = 2
    axes = tuple(range(-rank, 0))
    scale = np.maximum(np.max(np.abs(b), axis=axes), 1.0)
    return np.max(np.abs(a - b), axis=axes) / scale


@dataclass
class RicciReport:
    """Weyl-Ricci data at a batch of points, with both computation paths.

    ``ric_w_sym`` comes from Levi-Civita data; ``ric_w_direct`` is the
    symmetrized Ricci tensor of the Weyl connection itself.  Residual arrays
    are per point.
    """

    point: Array
    ric_w_sym: Array
    ric_w_antisym: Array
    k: Array
    margin: Array
    ric_w_direct: Array
    k_trace: Array
    strict_at_theta: Array
    cross_path_residual: Array
    antisym_residual: Array
    trace_residual: Array
    positivity_spectrum: Array = field(repr=False, default=None)


def ricci_weyl(w: WeylStructure, x: Array, check: bool = True) -> RicciReport:
    x = np.asarray(x, dtype=float)
    n = w.n
    rd = riemannian_data(w, x, check)
    formula = ricci_weyl_formula(n, rd)
    full = ricci_from_curvature(curvature(weyl_connection(w), x, check=check))
    direct = 0.5 * (full + np.swapaxes(full, -1, -2))
    antisym = 0.5 * (full - np.swapaxes(full, -1, -2))
    k = conformal_scalar_formula(n, rd)
    k_trace = np.einsum("...ab,...ab->...", rd.ginv, formula)
    q = positivity_form(n, formula, rd)
    spectrum = relative_eigvalsh(q, rd.g)
    theta_up = np.einsum("...ab,...b->...a", rd.ginv, rd.theta)
    return RicciReport(
        point=x,
        ric_w_sym=formula,
        ric_w_antisym=antisym,
        k=k,
        margin=spectrum[..., 0],
        ric_w_direct=direct,
        k_trace=k_trace,
        strict_at_theta=np.einsum("...a,...ab,...b->...", theta_up, formula, theta_up),
        cross_path_residual=_rel(direct, formula),
        antisym_residual=np.max(np.abs(antisym - 0.25 * n * rd.dtheta), axis=(-1, -2)),
        trace_residual=np.abs(k_trace - k) / np.maximum(np.abs(k), 1.0),
        positivity_spectrum=spectrum,
    )


def ricci_spectrum(w: WeylStructure, x: Array) -> Array:
    """Eigenvalues of ``Ric^W`` relative to ``g`` (ascending)."""
    rd = riemannian_data(w, x)
    return relative_eigvalsh(ricci_weyl_formula(w.n, rd), rd.g)


def positivity_margin(w: WeylStructure, x: Array) -> tuple:
    """``(margin, strict_at_theta)`` at each point.

    ``margin`` is the smallest eigenvalue, relative to ``g``, of
    ``Ric^W - (n-2)(n-4)/8 (|θ|^2 g - θ⊗θ)``; the Bochner hypothesis holds at a
    point iff it is ``>= -tol``.  ``strict_at_theta = Ric^W(θ^#, θ^#)``.
    """
    rep = ricci_weyl(w, x)
    return rep.margin, rep.strict_at_theta


def positivity_spectrum(w: WeylStructure, x: Array) -> Array:
    rd = riemannian_data(w, x)
    q = positivity_form(w.n, ricci_weyl_formula(w.n, rd), rd)
    return relative_eigvalsh(q, rd.g)


def tilde_norm_identity(w: WeylStructure, xi: TensorField, x: Array) -> Array:
    """Pointwise residual of the expansion of ``|nabla~ ξ|^2`` in Levi-Civita terms.

    The left side uses the coefficients of :func:`tilde_connection`; the right
    side uses only Levi-Civita derivatives of ``ξ`` and ``θ``.  The residual is
    divided by ``max(1, |nabla~ ξ|^2)`` so that large components near chart
    singularities do not turn roundoff into failures.
    """
    if xi.valence != (1, 0):
        raise ContractError(f"xi must be a vector field, got valence {xi.valence}")
    x = np.asarray(x, dtype=float)
    n = w.n
    gx = w.g(x)
    gi = w.g.inverse(x)
    v, dv = xi(x), xi.jac(x)
    nab_t = covariant_derivative(tilde_connection(w)(x), v, dv, (1, 0))
    lhs = tensor_norm2(gx, gi, nab_t, (1, 1))

    nab = covariant_derivative(levi_civita(w.g)(x), v, dv, (1, 0))  # [k, i] = (nabla_i xi)^k
    th = w.theta(x)
    th_up = np.einsum("...ab,...b->...a", gi, th)
    along_theta = np.einsum("...kl,...ki,...i,...l->...", gx, nab, th_up, v)
    theta_of_nabla_xi_xi = np.einsum("...k,...ki,...i->...", th, nab, v)
    xi2 = np.einsum("...a,...ab,...b->...", v, gx, v)
    th2 = np.einsum("...a,...ab,...b->...", th, gi, th)
    th_xi = np.einsum("...a,...a->...", th, v)
    rhs = (
        tensor_norm2(gx, gi, nab, (1, 1))
        - 0.5 * (n - 2) * along_theta
        + 0.5 * (n - 2) * theta_of_nabla_xi_xi
        + (n - 2) ** 2 / 8.0 * (th2 * xi2 - th_xi**2)
    )
    return np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))


def codiff_theta_on_grid(w: WeylStructure, grid: PeriodicGrid) -> Array:
    def func(x):
        lc = levi_civita(w.g)
        return codiff_components(w.g.inverse(x), lc(x), w.theta(x), w.theta.jac(x), 1)

    return grid_values(func, grid)


def grid_values(func, grid: PeriodicGrid) -> Array:
    """Evaluate at the regular nodes of ``grid``; nodes in singular tubes get 0."""
    mask = grid.chart.regular_mask(grid.points)
    out = None
    vals = evaluate(func, grid.points[mask])
    out = np.zeros(grid.shape + vals.shape[1:])
    out[mask] = vals
    return out


class BochnerQuadrature:
    """Quadrature workspace for the Weyl-Bochner integral identity on one grid.

    Geometry at the regular grid nodes (metric, Levi-Civita and auxiliary
    connection coefficients, ``Ric^W``) is evaluated once; :meth:`terms` then
    costs one evaluation of the 1-form and its partials per node.
    """

    def __init__(self, w: WeylStructure, grid: PeriodicGrid, gauge_tol: float = 1e-6):
        dstar_theta = codiff_theta_on_grid(w, grid)
        self.gauge_norm = float(np.max(np.abs(dstar_theta)))
        if self.gauge_norm > gauge_tol:
            raise PreconditionError(
                f"Weyl structure {w.name!r} is not in the co-closed gauge: "
                f"||d*theta||_inf = {self.gauge_norm:.3e} > {gauge_tol:.1e}"
            )
        self.w = w
        self.grid = grid
        mask = grid.chart.regular_mask(grid.points)
        self.nodes = grid.points[mask]
        self.weights = grid.coord_weights[mask]
        n = w.n
        tilde = tilde_connection(w)

        def geometry(x):
            rd = riemannian_data(w, x, check=False)
            return {
                "g": rd.g,
                "ginv": rd.ginv,
                "dginv": w.g.inverse_jac(x),
                "gamma": rd.gamma,
                "tilde": tilde(x),
                "ric_w": ricci_weyl_formula(n, rd),
                "theta": rd.theta,
                "theta_norm2": rd.theta_norm2,
                "sqrt_det": np.sqrt(np.linalg.det(rd.g)),
            }

        chunks = [geometry(self.nodes[i:i + 8192]) for i in range(0, len(self.nodes), 8192)]
        self.geo = {k: np.concatenate([c[k] for c in chunks]) for k in chunks[0]}

    def terms(self, phi: TensorField) -> dict:
        """Quadratures entering the identity for the 1-form ``φ``.

        Keys: ``d_phi``, ``codiff_phi`` (squared L2 norms), ``tilde``
        (``||nabla~ ξ||^2``), ``curvature`` (integral of the positivity-form
        density), ``defect`` (``(n-2)/2 ∫ θ(ξ) d*φ``, which the identity needs
        to vanish and does for co-closed ``φ``), ``scale``
        (``||ξ||^2 + ||nabla ξ||^2``) and ``residual``.
        """
        if phi.valence != (0, 1):
            raise ContractError(f"phi must be a 1-form, got valence {phi.valence}")
        n = self.w.n
        geo = self.geo
        x = self.nodes
        p, dp = evaluate(phi, x), evaluate(phi.jac, x)
        ginv, g = geo["ginv"], geo["g"]
        v = np.einsum("...ab,...b->...a", ginv, p)
        dv = np.einsum("...abm,...b->...am", geo["dginv"], p) + np.einsum("...ab,...bm->...am", ginv, dp)
        dphi = d_components(dp, 1)
        dstar = codiff_components(ginv, geo["gamma"], p, dp, 1)
        nab = covariant_derivative(geo["gamma"], v, dv, (1, 0))
        nab_t = covariant_derivative(geo["tilde"], v, dv, (1, 0))
        xi2 = np.einsum("...a,...ab,...b->...", v, g, v)
        th_xi = np.einsum("...a,...a->...", geo["theta"], v)
        curv = np.einsum("...a,...ab,...b->...", v, geo["ric_w"], v) - (n - 2) * (n - 4) / 8.0 * (
            geo["theta_norm2"] * xi2 - th_xi**2
        )
        dens = np.stack(
            [
                inner_components(ginv, dphi, dphi, 2),
                dstar**2,
                tensor_norm2(g, ginv, nab_t, (1, 1)),
                curv,
                th_xi * dstar,
                xi2 + tensor_norm2(g, ginv, nab, (1, 1)),
            ],
            axis=-1,
        )
        # coordinate weights times the volume density of the current representative
        ints = (self.weights * geo["sqrt_det"]) @ dens
        d_phi, codiff_phi, tilde_n, curv_i, cross, scale = (float(v) for v in ints)
        lhs = d_phi + codiff_phi
        rhs = tilde_n + curv_i
        return {
            "d_phi": d_phi,
            "codiff_phi": codiff_phi,
            "tilde": tilde_n,
            "curvature": curv_i,
            "defect": 0.5 * (n - 2) * cross,
            "scale": scale,
            "gauge_norm": self.gauge_norm,
            "residual": abs(lhs - rhs) / scale if scale > 0 else abs(lhs - rhs),
        }


def weitzenbock_terms(w: WeylStructure, phi: TensorField, grid: PeriodicGrid, gauge_tol: float = 1e-6) -> dict:
    """Single-form convenience wrapper around :class:`BochnerQuadrature`."""
    return BochnerQuadrature(w, grid, gauge_tol).terms(phi)


def weitzenbock_residual(w: WeylStructure, phi: TensorField, grid: PeriodicGrid, gauge_tol: float = 1e-6) -> float:
    """Relative residual of the Weyl-Bochner identity for ``φ`` on ``grid``.

    ``| ||dφ||^2 + ||d*φ||^2 - ||nabla~ ξ||^2 - ∫ (Ric^W(ξ,ξ) - (n-2)(n-4)/8 (|θ|^2|ξ|^2 - θ(ξ)^2)) |``
    divided by ``||ξ||^2 + ||nabla ξ||^2``.  Requires ``d*θ = 0`` on the grid.
    """
    return weitzenbock_terms(w, phi, grid, gauge_tol)["residual"]


def gauge_transform(w: WeylStructure, f: TensorField) -> WeylStructure:
    """The same Weyl connection in the gauge ``(e^{2f} g, θ + 2 df)``."""
    if f.valence != (0, 0):
        raise ContractError("conformal factor must be a scalar field")
    th = w.theta

    def func(x):
        return th(x) + 2 * f.jac(x)

    def jac(x):
        return th.jac(x) + 2 * f.hess(x)

    theta_new = TensorField(func, (0, 1), w.chart, jac=jac, fd_step=th.fd_step, name=f"{th.name}+2d{f.name}")
    return replace(w, g=conformal_metric(w.g, f), theta=theta_new, name=f"{w.name}[gauge]")


@dataclass
class GaugeSolution:
    """Result of the co-closed gauge solve.

    ``f`` holds node values (grid mean zero); ``field`` is its spectral
    interpolant, usable with :func:`gauge_transform`.
    """

    f: Array
    residual: float
    field: TrigField
    iterations: int
    scheme: str

    def __iter__(self):
        yield self.f
        yield self.residual

    def apply(self, w: WeylStructure) -> WeylStructure:
        return gauge_transform(w, self.field)


def gauduchon_gauge(
    w: WeylStructure,
    grid: PeriodicGrid,
    scheme: str = "spectral",
    gauge_tol: float = 1e-6,
    rtol: float = 1e-13,
    maxiter: int = 400,
) -> GaugeSolution:
    """Conformal factor ``f`` making ``θ + 2df`` co-closed for ``e^{2f} g``.

    With ``v = exp((n-2) f)`` the condition becomes the linear equation
    ``Δv - (n-2)/2 <θ, dv> + (n-2)/2 (d*θ) v = 0``, whose kernel is spanned by
    a positive function.  It is solved as ``L(1 + w) = 0`` with ``w`` of zero
    mean (right-preconditioned GMRES, flat Laplacian preconditioner).  The
    answer is certified by recomputing ``d*'θ'`` in the new gauge.
    """
    n = w.n
    if n < 3:
        raise UnsupportedError("the co-closed gauge is only unique up to homothety for n >= 3")
    if not grid.uniform:
        raise UnsupportedError("gauduchon_gauge needs a fully periodic (torus-type) grid")
    diff = PeriodicDifferentiator(grid, scheme)
    pts = grid.points
    gx = evaluate(w.g, pts)
    gi = np.linalg.inv(gx)
    sq = np.sqrt(np.linalg.det(gx))
    th = evaluate(w.theta, pts)
    c = n - 2
    dstar_theta = diff.codiff_oneform(gi, sq, th)
    shape = grid.shape

    def apply_l(v):
        dv = diff.gradient(v)
        lap = diff.codiff_oneform(gi, sq, dv)
        return lap - 0.5 * c * np.einsum("...ij,...i,...j->...", gi, th, dv) + 0.5 * c * dstar_theta * v

    symbol = diff.laplacian_symbol() * float(np.mean(np.trace(gi, axis1=-2, axis2=-1))) / n
    # the mean is projected out; other modes invisible to the discrete first
    # derivatives (Nyquist combinations on even grids) get the largest scale
    top = float(symbol.max())
    inv_symbol = 1.0 / np.maximum(symbol, top)
    inv_symbol[symbol > 1e-12 * top] = 1.0 / symbol[symbol > 1e-12 * top]
    inv_symbol.flat[0] = 0.0

    def precond(r):
        return np.real(np.fft.ifftn(np.fft.fftn(r) * inv_symbol))

    rhs = -0.5 * c * dstar_theta
    iterations = 0
    if np.max(np.abs(rhs)) < 1e-15:
        wsol = np.zeros(shape)
    else:
        counter = {"it": 0}

        def matvec(y):
            return apply_l(precond(y.reshape(shape))).ravel()

        def cb(_):
            counter["it"] += 1

        op = spla.LinearOperator((grid.size, grid.size), matvec=matvec, dtype=float)
        y, info = spla.gmres(
            op, rhs.ravel(), rtol=rtol, atol=0.0, restart=60, maxiter=maxiter, callback=cb, callback_type="pr_norm"
        )
        iterations = counter["it"]
        wsol = precond(y.reshape(shape))
        if info != 0:
            res = float(np.max(np.abs(apply_l(wsol) - rhs)))
            if res > 1e3 * rtol * max(1.0, float(np.max(np.abs(rhs)))):
                raise SolverError(f"GMRES did not converge (info={info}); final residual {res:.3e}", res)
    v = 1.0 + wsol
    if np.all(v < 0):
        v = -v
    if np.any(v <= 0):
        raise SolverError(f"null vector changes sign (min {v.min():.3e}); grid too coarse?", float(v.min()))
    f = np.log(v) / c
    f -= f.mean()

    gi_new = np.exp(-2 * f)[..., None, None] * gi
    sq_new = np.exp(n * f) * sq
    th_new = th + 2 * diff.gradient(f)
    residual = float(np.max(np.abs(diff.codiff_oneform(gi_new, sq_new, th_new))))
    if residual > gauge_tol:
        raise SolverError(
            f"co-closed gauge residual ||d*'theta'||_inf = {residual:.3e} exceeds {gauge_tol:.1e}", residual
        )
    field_ = TrigField.from_grid(f, grid.chart, (0, 0), rel_cutoff=1e-13, name="f_gauge")
    return GaugeSolution(f, residual, field_, iterations, scheme)


def theta_periods(w: WeylStructure, grid: PeriodicGrid, f: Optional[Array] = None) -> Array:
    """Mean of each ``θ`` component over a torus grid.

    For a closed form this is its period along the axis loop divided by the
    axis length, i.e. the coefficient of its harmonic part for a flat reference.
    With ``f`` (grid samples of a conformal factor) the periods are those of
    ``θ + 2 df``, the Lee form in the gauge ``e^{2f} g``, differentiated
    spectrally on the grid.
    """
    if not grid.uniform:
        raise UnsupportedError("periods are defined here for torus-type grids only")
    th = evaluate(w.theta, grid.points)
    if f is not None:
        th = th + 2 * PeriodicDifferentiator(grid).gradient(np.asarray(f, dtype=float))
    return th.reshape(-1, w.n).mean(axis=0)


def parallel_check(w: WeylStructure, grid: PeriodicGrid) -> float:
    """``max |nabla θ|`` (Levi-Civita) over the regular grid nodes."""

    lc = levi_civita(w.g)

    def func(x):
        gx = w.g(x)
        gi = np.linalg.inv(gx)
        nab = covariant_derivative(lc(x), w.theta(x), w.theta.jac(x), (0, 1))
        return np.sqrt(np.maximum(tensor_norm2(gx, gi, nab, (0, 2)), 0.0))

    return float(np.max(grid_values(func, grid)))


def b1_bound_violations(
    name: str,
    n: int,
    b1: int,
    exactness: str,
    margin_min: float,
    strict_max: float,
    tol: float = 1e-5,
) -> list:
    """Consistency of catalog metadata with the Weyl-Bochner vanishing statements.

    Returns a list of violation messages (empty when consistent).  Exact
    structures and ``n <= 2`` are outside the statements' hypotheses.
    """
    if exactness == "exact" or n <= 2:
        return []
    out = []
    if margin_min >= -tol and b1 > 1:
        out.append(f"{name}: positivity holds (margin {margin_min:.3g}) but b1 = {b1} > 1")
    if margin_min >= -tol and strict_max > tol and b1 != 0:
        out.append(f"{name}: strict at theta ({strict_max:.3g}) but b1 = {b1} != 0")
    return out
