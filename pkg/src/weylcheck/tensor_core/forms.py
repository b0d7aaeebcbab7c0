"""Pointwise exterior calculus on chart fields.

Forms are stored as fully antisymmetric component arrays.  The exterior
derivative and the wedge product use the determinant convention
(``dα(X, Y) = X α(Y) - Y α(X) - α([X, Y])``, ``(α∧β)(X, Y) = α(X)β(Y) - α(Y)β(X)``),
and the pointwise inner product of ``k``-forms carries a ``1/k!`` so that
``|dx^1 ∧ dx^2| = 1`` for the flat metric.  The codifferential is the formal
L2 adjoint of ``d``, which makes ``d d* + d* d`` positive semidefinite.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import factorial

import numpy as np

from ..errors import ContractError
from .connection import covariant_derivative, levi_civita
from .fields import Array, MetricField, TensorField


@lru_cache(maxsize=None)
def _perms(k: int):
    out = []
    for perm in itertools.permutations(range(k)):
        inv = sum(1 for i in range(k) for j in range(i + 1, k) if perm[i] > perm[j])
        out.append((perm, -1.0 if inv % 2 else 1.0))
    return tuple(out)


def alternate(t: Array, k: int, offset: int = 0) -> Array:
    """Antisymmetrize ``k`` consecutive axes starting ``offset`` axes from the end-block.

    The axes are ``t.ndim - k - offset .. t.ndim - offset - 1``.  Normalized as
    a projection (``alternate`` of an antisymmetric array is itself).
    """
    if k <= 1:
        return np.array(t, copy=True)
    start = t.ndim - k - offset
    axes = list(range(t.ndim))
    acc = np.zeros_like(t)
    for perm, sign in _perms(k):
        order = axes[:start] + [start + p for p in perm] + axes[start + k:]
        acc += sign * np.transpose(t, order)
    return acc / factorial(k)


def form_degree(form: TensorField) -> int:
    r, s = form.valence
    if r != 0:
        raise ContractError(f"expected a differential form, got valence {form.valence}")
    return s


def d_components(comps_jac: Array, k: int) -> Array:
    """``dα`` from the partials ``J[..., i1..ik, m] = d_m α_{i1..ik}``."""
    t = np.moveaxis(comps_jac, -1, -(k + 1))  # [..., m, i1..ik]
    return (k + 1) * alternate(t, k + 1)


def d(form: TensorField) -> TensorField:
    """Exterior derivative of a ``k``-form field (``(0, k)`` valence)."""
    k = form_degree(form)

    def func(x):
        return d_components(form.jac(x), k)

    def jac(x):
        h = form.hess(x)  # [..., I, m, p]; keep p last
        t = np.moveaxis(h, -2, -(k + 2))  # [..., m, I, p]
        return (k + 1) * alternate(t, k + 1, offset=1)

    return TensorField(func, (0, k + 1), form.chart, jac=jac, fd_step=form.fd_step, name=f"d{form.name}")


def wedge_components(a: Array, p: int, b: Array, q: int) -> Array:
    """``α∧β = (p+q)!/(p! q!) Alt(α ⊗ β)``."""
    batch = a.ndim - p
    ta = a.reshape(a.shape + (1,) * q)
    tb = b.reshape(b.shape[:batch] + (1,) * p + b.shape[batch:])
    prod = ta * tb
    return factorial(p + q) / (factorial(p) * factorial(q)) * alternate(prod, p + q)


def wedge(a: TensorField, b: TensorField) -> TensorField:
    p, q = form_degree(a), form_degree(b)
    if a.chart is not b.chart and a.chart.dim != b.chart.dim:
        raise ContractError("wedge of forms on different charts")

    def func(x):
        return wedge_components(a(x), p, b(x), q)

    def jac(x):
        ja = np.moveaxis(a.jac(x), -1, 0)
        jb = np.moveaxis(b.jac(x), -1, 0)
        av, bv = a(x), b(x)
        terms = [wedge_components(ja[m], p, bv, q) + wedge_components(av, p, jb[m], q) for m in range(len(ja))]
        return np.stack(terms, axis=-1)

    return TensorField(func, (0, p + q), a.chart, jac=jac, fd_step=a.fd_step, name=f"{a.name}^{b.name}")


def raise_all(g_inv: Array, comps: Array, k: int) -> Array:
    batch = comps.ndim - k
    out = comps
    for slot in range(k):
        moved = np.moveaxis(out, batch + slot, -1)
        moved = np.einsum("...ab,...b->...a", _bcast(g_inv, moved), moved)
        out = np.moveaxis(moved, -1, batch + slot)
    return out


def _bcast(mat: Array, target: Array) -> Array:
    # insert singleton axes so a (B..., n, n) matrix broadcasts against (B..., O..., n)
    extra = target.ndim - (mat.ndim - 1)
    return mat.reshape(mat.shape[:-2] + (1,) * extra + mat.shape[-2:])


def inner_components(g_inv: Array, a: Array, b: Array, k: int) -> Array:
    """Pointwise ``<α, β>`` of ``k``-forms, with the ``1/k!`` normalization."""
    if k == 0:
        return a * b
    up = raise_all(g_inv, b, k)
    axes = tuple(range(-k, 0))
    return np.sum(a * up, axis=axes) / factorial(k)


def inner(g: MetricField, a: TensorField, b: TensorField, x: Array) -> Array:
    k = form_degree(a)
    if form_degree(b) != k:
        raise ContractError(f"inner product of a {k}-form with a {form_degree(b)}-form")
    return inner_components(g.inverse(x), a(x), b(x), k)


def tensor_norm2(g: Array, g_inv: Array, comps: Array, valence: tuple) -> Array:
    """Full-contraction squared norm of a tensor (no factorial weights)."""
    r, s = valence
    rank = r + s
    batch = comps.ndim - rank
    other = comps
    for slot in range(rank):
        mat = g if slot < r else g_inv
        moved = np.moveaxis(other, batch + slot, -1)
        other = np.moveaxis(np.einsum("...ab,...b->...a", _bcast(mat, moved), moved), -1, batch + slot)
    return np.sum(comps * other, axis=tuple(range(-rank, 0))) if rank else comps * other


def pointwise_norm(g: MetricField, field_: TensorField, x: Array, form: bool = False) -> Array:
    """``|T|`` at ``x``; with ``form=True`` uses the ``1/k!`` form normalization."""
    gx, gi = g(x), g.inverse(x)
    n2 = tensor_norm2(gx, gi, field_(x), field_.valence)
    if form:
        n2 = n2 / factorial(form_degree(field_))
    return np.sqrt(np.maximum(n2, 0.0))


def sharp(g: MetricField, alpha: TensorField) -> TensorField:
    """Metric dual vector field of a 1-form."""
    if alpha.valence != (0, 1):
        raise ContractError(f"sharp expects a 1-form, got valence {alpha.valence}")

    def func(x):
        return np.einsum("...ab,...b->...a", g.inverse(x), alpha(x))

    def jac(x):
        return np.einsum("...abm,...b->...am", g.inverse_jac(x), alpha(x)) + np.einsum(
            "...ab,...bm->...am", g.inverse(x), alpha.jac(x)
        )

    return TensorField(func, (1, 0), alpha.chart, jac=jac, fd_step=alpha.fd_step, name=f"{alpha.name}#")


def flat(g: MetricField, vec: TensorField) -> TensorField:
    """Metric dual 1-form of a vector field."""
    if vec.valence != (1, 0):
        raise ContractError(f"flat expects a vector field, got valence {vec.valence}")

    def func(x):
        return np.einsum("...ab,...b->...a", g(x), vec(x))

    def jac(x):
        return np.einsum("...abm,...b->...am", g.jac(x), vec(x)) + np.einsum("...ab,...bm->...am", g(x), vec.jac(x))

    return TensorField(func, (0, 1), vec.chart, jac=jac, fd_step=vec.fd_step, name=f"{vec.name}b")


def codiff_components(g_inv: Array, gamma: Array, comps: Array, partials: Array, k: int) -> Array:
    """``(d* α)_{J} = -g^{ab} (nabla_a α)_{b J}`` for a ``k``-form (``k >= 1``)."""
    nab = covariant_derivative(gamma, comps, partials, (0, k))  # [..., b, J, a]
    nab = np.moveaxis(nab, -1, -(k + 1))  # [..., a, b, J]
    batch = comps.ndim - k
    g = g_inv.reshape(g_inv.shape[:batch] + g_inv.shape[-2:] + (1,) * (k - 1))
    return -np.sum(g * nab, axis=(batch, batch + 1))


def codiff(g: MetricField, form: TensorField) -> TensorField:
    """Codifferential ``d*`` of a ``k``-form (the formal adjoint of ``d``)."""
    k = form_degree(form)
    if k == 0:
        raise ContractError("codifferential of a 0-form is zero by definition; pass a k>=1 form")
    lc = levi_civita(g)

    def func(x):
        return codiff_components(g.inverse(x), lc(x), form(x), form.jac(x), k)

    return TensorField(func, (0, k - 1), form.chart, fd_step=form.fd_step, name=f"d*{form.name}")


def interior(vec: Array, comps: Array, k: int) -> Array:
    """``i_v α`` (contract the first slot)."""
    batch = comps.ndim - k
    v = vec.reshape(vec.shape + (1,) * (k - 1))
    return np.sum(v * comps, axis=batch)


def complex_dual(j: Array, alpha: Array) -> Array:
    """``(Jα)(X) = -α(JX)`` for a 1-form, with ``j[..., a, i] = J^a_i``."""
    return -np.einsum("...a,...ai->...i", alpha, j)
