"""Charts, point-evaluable tensor fields and their derivative strategies.

All evaluators are vectorized: a point batch has shape ``(..., n)`` and a
field of valence ``(r, s)`` returns components of shape ``(..., n, ..., n)``
with ``r + s`` trailing axes (contravariant indices first).  Partial
derivatives append the differentiation index(es) last, so ``jac(x)[..., a, m]``
is ``d_m T_a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import ContractError, SingularChartError

Array = np.ndarray

# offsets and weights of the 4th-order central first-derivative stencil
_D1_OFFSETS = (-2, -1, 1, 2)
_D1_WEIGHTS = (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)
# 4th-order central second-derivative stencil
_D2_OFFSETS = (-2, -1, 0, 1, 2)
_D2_WEIGHTS = (-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0)


@dataclass(frozen=True)
class ChartDomain:
    """A coordinate box with optional periodic identifications.

    Parameters
    ----------
    lower, upper : sequence of float
        Coordinate bounds per axis.
    periodic : sequence of bool
        Whether each axis is identified end to end.
    measure_weight : callable, optional
        ``w(x) >= 0`` multiplying the coordinate volume element.  Defaults to 1.
    singular_distance : callable, optional
        Distance (in coordinates) from ``x`` to the declared singular locus,
        e.g. the poles of spherical coordinates.
    region : callable, optional
        Boolean membership mask for charts that only use part of the box.
    """

    lower: tuple
    upper: tuple
    periodic: tuple
    measure_weight: Optional[Callable[[Array], Array]] = None
    singular_distance: Optional[Callable[[Array], Array]] = None
    region: Optional[Callable[[Array], Array]] = None
    name: str = "chart"

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        periodic = tuple(bool(v) for v in self.periodic)
        if not (len(lower) == len(upper) == len(periodic)):
            raise ContractError("lower, upper and periodic must have equal length")
        if len(lower) < 2:
            raise ContractError(f"chart dimension must be >= 2, got {len(lower)}")
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise ContractError("every axis needs lower < upper")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "periodic", periodic)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def extent(self) -> Array:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def fully_periodic(self) -> bool:
        return all(self.periodic)

    def fd_steps(self, fd_step: float) -> Array:
        """Absolute finite-difference steps for a relative step size."""
        return fd_step * self.extent

    def singular_margin(self, fd_step: float) -> float:
        """Radius of the tube around the singular locus that evaluation avoids."""
        return 2.0 * fd_step * float(np.max(self.extent))

    def weight(self, x: Array) -> Array:
        x = np.asarray(x, dtype=float)
        if self.measure_weight is None:
            return np.ones(x.shape[:-1])
        return np.asarray(self.measure_weight(x), dtype=float)

    def regular_mask(self, x: Array, fd_step: float = 1e-3) -> Array:
        x = np.asarray(x, dtype=float)
        mask = np.ones(x.shape[:-1], dtype=bool)
        if self.singular_distance is not None:
            mask &= self.singular_distance(x) > self.singular_margin(fd_step)
        if self.region is not None:
            mask &= self.region(x)
        return mask

    def check_regular(self, x: Array, fd_step: float = 1e-3) -> None:
        """Raise :class:`SingularChartError` if any point sits in a singular tube."""
        if self.singular_distance is None:
            return
        x = np.asarray(x, dtype=float)
        dist = np.asarray(self.singular_distance(x))
        margin = self.singular_margin(fd_step)
        if np.any(dist <= margin):
            flat = np.ravel(dist)
            i = int(np.argmin(flat))
            point = x.reshape(-1, self.dim)[i]
            raise SingularChartError(
                f"point {np.array2string(point, precision=6)} on chart {self.name!r} lies within "
                f"{margin:.3g} of the singular locus (distance {flat[i]:.3g})"
            )

    def sample(self, rng: np.random.Generator, count: int, fd_step: float = 1e-3) -> Array:
        """Uniform random interior points away from the singular set.

        Points are kept at least ``2 * fd_step * extent`` from non-periodic
        box faces so finite-difference stencils stay inside the chart.
        """
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        pad = np.where(self.periodic, 0.0, 3.0 * self.fd_steps(fd_step))
        out = []
        have = 0
        while have < count:
            batch = lo + pad + (hi - lo - 2 * pad) * rng.random((max(2 * count, 16), self.dim))
            batch = batch[self.regular_mask(batch, fd_step)]
            out.append(batch)
            have += len(batch)
        return np.concatenate(out)[:count]


def _shift(x: Array, axis: int, step: float) -> Array:
    y = np.array(x, dtype=float, copy=True)
    y[..., axis] += step
    return y


def fd_jacobian(func: Callable[[Array], Array], x: Array, steps: Sequence[float]) -> Array:
    """4th-order central first partials of ``func`` at ``x``; derivative axis last."""
    x = np.asarray(x, dtype=float)
    cols = []
    for a, h in enumerate(steps):
        acc = 0.0
        for off, w in zip(_D1_OFFSETS, _D1_WEIGHTS):
            acc = acc + w * np.asarray(func(_shift(x, a, off * h)))
        cols.append(acc / h)
    return np.stack(cols, axis=-1)


def fd_hessian(func: Callable[[Array], Array], x: Array, steps: Sequence[float]) -> Array:
    """4th-order second partials using direct stencils (not nested first differences)."""
    x = np.asarray(x, dtype=float)
    n = len(steps)
    f0 = np.asarray(func(x))
    out = np.zeros(f0.shape + (n, n))
    for a in range(n):
        ha = steps[a]
        acc = 0.0
        for off, w in zip(_D2_OFFSETS, _D2_WEIGHTS):
            acc = acc + w * (f0 if off == 0 else np.asarray(func(_shift(x, a, off * ha))))
        out[..., a, a] = acc / ha**2
        for b in range(a + 1, n):
            hb = steps[b]
            acc = 0.0
            for oa, wa in zip(_D1_OFFSETS, _D1_WEIGHTS):
                xa = _shift(x, a, oa * ha)
                for ob, wb in zip(_D1_OFFSETS, _D1_WEIGHTS):
                    acc = acc + wa * wb * np.asarray(func(_shift(xa, b, ob * hb)))
            out[..., a, b] = out[..., b, a] = acc / (ha * hb)
    return out


class TensorField:
    """A point-evaluable ``(r, s)`` tensor field on a chart.

    ``jac`` and ``hess`` use the analytic closures when supplied and fall back
    to 4th-order central differences with step ``fd_step * extent`` otherwise.
    """

    def __init__(
        self,
        func: Callable[[Array], Array],
        valence: tuple,
        chart: ChartDomain,
        jac: Optional[Callable[[Array], Array]] = None,
        hess: Optional[Callable[[Array], Array]] = None,
        fd_step: float = 1e-3,
        name: str = "",
    ):
        r, s = (int(v) for v in valence)
        if r < 0 or s < 0:
            raise ContractError(f"invalid valence {valence}")
        self.func = func
        self.valence = (r, s)
        self.chart = chart
        self._jac = jac
        self._hess = hess
        self.fd_step = fd_step
        self.name = name

    def __repr__(self):
        return f"{type(self).__name__}({self.name or '?'}, valence={self.valence})"

    @property
    def dim(self) -> int:
        return self.chart.dim

    @property
    def rank(self) -> int:
        return sum(self.valence)

    @property
    def has_analytic_jac(self) -> bool:
        return self._jac is not None

    @property
    def has_analytic_hess(self) -> bool:
        return self._hess is not None

    def __call__(self, x: Array) -> Array:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def fd_jac(self, x: Array, fd_step: Optional[float] = None) -> Array:
        steps = self.chart.fd_steps(self.fd_step if fd_step is None else fd_step)
        return fd_jacobian(self, x, steps)

    def fd_hess(self, x: Array, fd_step: Optional[float] = None) -> Array:
        steps = self.chart.fd_steps(self.fd_step if fd_step is None else fd_step)
        return fd_hessian(self, x, steps)

    def jac(self, x: Array) -> Array:
        if self._jac is not None:
            return np.asarray(self._jac(np.asarray(x, dtype=float)), dtype=float)
        return self.fd_jac(x)

    def hess(self, x: Array) -> Array:
        if self._hess is not None:
            return np.asarray(self._hess(np.asarray(x, dtype=float)), dtype=float)
        if self._jac is not None:
            # one FD level on top of the analytic first partials
            steps = self.chart.fd_steps(self.fd_step)
            return fd_jacobian(self.jac, x, steps)
        return self.fd_hess(x)

    def with_name(self, name: str) -> "TensorField":
        self.name = name
        return self


def constant_field(value, valence: tuple, chart: ChartDomain, name: str = "") -> TensorField:
    """A field with the same components everywhere (zero partials)."""
    value = np.asarray(value, dtype=float)
    n = chart.dim

    def func(x):
        x = np.asarray(x)
        return np.broadcast_to(value, x.shape[:-1] + value.shape).copy()

    def jac(x):
        return np.zeros(np.asarray(x).shape[:-1] + value.shape + (n,))

    def hess(x):
        return np.zeros(np.asarray(x).shape[:-1] + value.shape + (n, n))

    return TensorField(func, valence, chart, jac=jac, hess=hess, name=name)


def scalar_field(chart: ChartDomain, func, jac=None, hess=None, name: str = "") -> TensorField:
    return TensorField(func, (0, 0), chart, jac=jac, hess=hess, name=name)


class MetricField(TensorField):
    """A Riemannian metric: a symmetric positive-definite ``(0, 2)`` field."""

    def __init__(self, func, chart, jac=None, hess=None, fd_step=1e-3, name=""):
        super().__init__(func, (0, 2), chart, jac=jac, hess=hess, fd_step=fd_step, name=name)

    def checked(self, x: Array) -> Array:
        """Metric components, raising if the metric is not positive definite."""
        g = self(x)
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            x = np.asarray(x)
            eig = np.linalg.eigvalsh(0.5 * (g + np.swapaxes(g, -1, -2)))
            bad = np.min(eig, axis=-1) <= 0
            point = x.reshape(-1, self.dim)[int(np.argmax(np.ravel(bad)))]
            raise SingularChartError(
                f"metric {self.name!r} is not positive definite at {np.array2string(point, precision=6)}"
            ) from None
        return g

    def inverse(self, x: Array) -> Array:
        return np.linalg.inv(self.checked(x))

    def inverse_jac(self, x: Array) -> Array:
        """``d_m g^{ab} = -g^{ac} d_m g_cd g^{db}``."""
        gi = self.inverse(x)
        dg = self.jac(x)
        return -np.einsum("...ac,...cdm,...db->...abm", gi, dg, gi)

    def volume_density(self, x: Array) -> Array:
        return np.sqrt(np.linalg.det(self.checked(x)))

    def inverse_field(self) -> TensorField:
        return TensorField(self.inverse, (2, 0), self.chart, jac=self.inverse_jac, name=f"{self.name}^-1")


def conformal_metric(g: MetricField, f: TensorField, name: str = "") -> MetricField:
    """``exp(2 f) g`` with product-rule partials."""

    def func(x):
        return np.exp(2 * f(x))[..., None, None] * g(x)

    def jac(x):
        e = np.exp(2 * f(x))[..., None, None, None]
        df = f.jac(x)
        return e * (2 * g(x)[..., None] * df[..., None, None, :] + g.jac(x))

    def hess(x):
        e = np.exp(2 * f(x))[..., None, None, None, None]
        df = f.jac(x)
        ddf = f.hess(x)
        gx = g(x)
        dg = g.jac(x)
        term = (
            4 * gx[..., None, None] * df[..., None, None, :, None] * df[..., None, None, None, :]
            + 2 * gx[..., None, None] * ddf[..., None, None, :, :]
            + 2 * dg[..., :, :, :, None] * df[..., None, None, None, :]
            + 2 * dg[..., :, :, None, :] * df[..., None, None, :, None]
            + g.hess(x)
        )
        return e * term

    return MetricField(func, g.chart, jac=jac, hess=hess, fd_step=g.fd_step, name=name or f"e^2f {g.name}")


def flat_metric(chart: ChartDomain, name: str = "flat") -> MetricField:
    n = chart.dim
    eye = np.eye(n)

    def func(x):
        return np.broadcast_to(eye, np.asarray(x).shape[:-1] + (n, n)).copy()

    return MetricField(
        func,
        chart,
        jac=lambda x: np.zeros(np.asarray(x).shape[:-1] + (n, n, n)),
        hess=lambda x: np.zeros(np.asarray(x).shape[:-1] + (n, n, n, n)),
        name=name,
    )


def relative_eigvalsh(q: Array, g: Array) -> Array:
    """Eigenvalues of the symmetric form ``q`` relative to ``g`` (``q v = mu g v``).

    Batched Cholesky reduction; eigenvalues ascending along the last axis.
    """
    q = 0.5 * (q + np.swapaxes(q, -1, -2))
    chol = np.linalg.cholesky(g)
    linv = np.linalg.inv(chol)
    m = linv @ q @ np.swapaxes(linv, -1, -2)
    return np.linalg.eigvalsh(0.5 * (m + np.swapaxes(m, -1, -2)))


def gram_schmidt(g: Array, order: Optional[Sequence[int]] = None) -> Array:
    """g-orthonormal frame from coordinate vectors taken in ``order``.

    Returns ``e[..., i, a]``: component ``a`` of frame vector ``i``.
    """
    n = g.shape[-1]
    order = list(range(n)) if order is None else list(order)
    frame = []
    for idx in order:
        v = np.zeros(g.shape[:-2] + (n,))
        v[..., idx] = 1.0
        for e in frame:
            v = v - np.einsum("...a,...ab,...b->...", v, g, e)[..., None] * e
        norm = np.sqrt(np.einsum("...a,...ab,...b->...", v, g, v))
        frame.append(v / norm[..., None])
    return np.stack(frame, axis=-2)


def fd_convergence_order(field_: TensorField, x: Array, fd_step: float) -> tuple[float, float, float]:
    """Observed order of the FD4 jacobian against the analytic one over steps h, h/2.

    Returns ``(err_h, err_h2, order)``.
    """
    exact = field_.jac(x)
    e1 = float(np.max(np.abs(field_.fd_jac(x, fd_step) - exact)))
    e2 = float(np.max(np.abs(field_.fd_jac(x, fd_step / 2) - exact)))
    order = np.log2(e1 / e2) if e2 > 0 else np.inf
    return e1, e2, float(order)
