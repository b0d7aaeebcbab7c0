"""Explicit manifolds with analytic partials and ground-truth metadata.

Betti numbers stored in metadata are standard topological facts (torus:
``b1 = n``; ``S^1 x S^k`` and Hopf manifolds: ``b1 = 1``), supplied as
external ground truth rather than computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import ContractError
from .hermitian import HermitianStructure, standard_complex_structure
from .tensor_core.fields import ChartDomain, MetricField, TensorField, constant_field, flat_metric
from .tensor_core.trig import TrigField, sin_potential
from .weyl import WeylStructure


@dataclass
class CatalogEntry:
    name: str
    params: dict
    structure: Union[WeylStructure, HermitianStructure]
    metadata: dict = field(default_factory=dict)

    @property
    def weyl(self) -> WeylStructure:
        if isinstance(self.structure, HermitianStructure):
            return self.structure.weyl_structure()
        return self.structure

    @property
    def hermitian(self) -> Optional[HermitianStructure]:
        return self.structure if isinstance(self.structure, HermitianStructure) else None

    @property
    def chart(self) -> ChartDomain:
        return self.structure.chart


def torus_chart(n: int, name: Optional[str] = None) -> ChartDomain:
    return ChartDomain(
        lower=(0.0,) * n, upper=(2 * np.pi,) * n, periodic=(True,) * n, name=name or f"T{n}"
    )


def flat_torus(n: int, theta_const: Sequence[float] = (1.0,), exact_part: Optional[TensorField] = None) -> CatalogEntry:
    """Flat ``[0, 2π)^n`` with ``θ = Σ c_a dx^a + d(h)``.

    ``theta_const`` is zero-padded to length ``n``; ``exact_part`` is the
    scalar ``h`` (must carry a hessian, e.g. a :class:`TrigField`).
    """
    if not 2 <= n <= 6:
        raise ContractError(f"flat_torus supports 2 <= n <= 6, got {n}")
    c = np.zeros(n)
    tc = np.asarray(theta_const, dtype=float)
    if len(tc) > n:
        raise ContractError(f"{len(tc)} constant coefficients for a {n}-torus")
    c[: len(tc)] = tc
    chart = torus_chart(n)
    g = flat_metric(chart)
    if exact_part is None:
        theta = constant_field(c, (0, 1), chart, name="theta")
    else:
        if exact_part.valence != (0, 0):
            raise ContractError("exact_part must be a scalar potential")
        h = exact_part

        def func(x):
            return c + h.jac(x)

        theta = TensorField(func, (0, 1), chart, jac=h.hess, name="theta")
    nonexact = bool(np.any(c != 0))
    tag = "closed-non-exact" if nonexact else "exact"
    label = "flat_torus(%d, [%s]%s)" % (n, ", ".join(f"{v:g}" for v in c), ", exact" if exact_part is not None else "")
    theta2 = float(c @ c)
    meta = {
        "b1": n,
        "b1_source": "topology of the n-torus",
        "exactness": tag,
        "theorem_applicable": nonexact and n > 2,
        "expected_parallel": exact_part is None,
        "gauduchon": exact_part is None,
        "volume": (2 * np.pi) ** n,
        "periods": c.tolist(),
    }
    if exact_part is None:
        # flat metric, constant θ: Ric^W = -(n-2)/4 (|θ|^2 g - θ⊗θ)
        ric = [0.0] + [-(n - 2) / 4 * theta2] * (n - 1) if nonexact else [0.0] * n
        pos = [0.0] + [-(n - 2) / 4 * theta2 - (n - 2) * (n - 4) / 8 * theta2] * (n - 1) if nonexact else [0.0] * n
        meta.update(
            ric_w_spectrum=sorted(ric),
            k=-(n - 1) * (n - 2) / 4 * theta2,
            margin=min(pos),
            strict_at_theta=0.0,
            expected_margin_sign=int(np.sign(round(min(pos), 12))),
        )
    structure = WeylStructure(chart, g, theta, tag, name=label)
    return CatalogEntry(label, {"n": n, "theta_const": c.tolist(), "exact_part": exact_part is not None}, structure, meta)


def sphere_product_chart(k: int, name: str) -> ChartDomain:
    """``t ∈ [0, 2π)`` periodic, then hyperspherical angles of ``S^k``.

    Angles ``χ_1..χ_{k-1} ∈ (0, π)`` and a periodic ``φ ∈ [0, 2π)``.  The
    measure weight is the round volume density ``Π sin^{k-i} χ_i``.
    """
    lower = (0.0,) + (0.0,) * (k - 1) + (0.0,)
    upper = (2 * np.pi,) + (np.pi,) * (k - 1) + (2 * np.pi,)
    periodic = (True,) + (False,) * (k - 1) + (True,)

    def weight(x):
        x = np.asarray(x, dtype=float)
        out = np.ones(x.shape[:-1])
        for i in range(1, k):
            out = out * np.sin(x[..., i]) ** (k - i)
        return out

    def distance(x):
        x = np.asarray(x, dtype=float)
        ang = x[..., 1:k]
        return np.min(np.minimum(ang, np.pi - ang), axis=-1)

    return ChartDomain(lower, upper, periodic, measure_weight=weight, singular_distance=distance, name=name)


def round_product_metric(chart: ChartDomain, k: int) -> MetricField:
    """``dt^2 + dχ_1^2 + sin^2 χ_1 dχ_2^2 + ... + (Π sin^2 χ_i) dφ^2`` with exact partials."""
    n = k + 1

    def parts(x):
        x = np.asarray(x, dtype=float)
        s = np.sin(x[..., 1:k]) ** 2
        ds = np.sin(2 * x[..., 1:k])
        dds = 2 * np.cos(2 * x[..., 1:k])
        return s, ds, dds

    def diag_entry(s, j):
        # metric entry for sphere slot j (0-based among the k sphere coordinates)
        out = np.ones(s.shape[:-1])
        for i in range(j):
            out = out * s[..., i]
        return out

    def func(x):
        s, _, _ = parts(x)
        g = np.zeros(s.shape[:-1] + (n, n))
        g[..., 0, 0] = 1.0
        for j in range(k):
            g[..., j + 1, j + 1] = diag_entry(s, j)
        return g

    def jac(x):
        s, ds, _ = parts(x)
        out = np.zeros(s.shape[:-1] + (n, n, n))
        for j in range(k):
            for i in range(j):
                term = ds[..., i]
                for l in range(j):
                    if l != i:
                        term = term * s[..., l]
                out[..., j + 1, j + 1, i + 1] = term
        return out

    def hess(x):
        s, ds, dds = parts(x)
        out = np.zeros(s.shape[:-1] + (n, n, n, n))
        for j in range(k):
            for i in range(j):
                for p in range(j):
                    term = dds[..., i] if i == p else ds[..., i] * ds[..., p]
                    for l in range(j):
                        if l != i and l != p:
                            term = term * s[..., l]
                    out[..., j + 1, j + 1, i + 1, p + 1] = term
        return out

    return MetricField(func, chart, jac=jac, hess=hess, name=f"dt^2+round S^{k}")


def hopf_product(k: int = 3, lam: float = 1.0) -> CatalogEntry:
    """``S^1 x S^k`` with the product of the unit circle and round sphere, ``θ = λ dt``."""
    if k not in (2, 3, 5):
        raise ContractError(f"hopf_product supports sphere dimensions 2, 3, 5; got {k}")
    if lam == 0:
        raise ContractError("λ = 0 gives an exact (Levi-Civita) structure; rejected")
    n = k + 1
    label = f"hopf_product({k}, {lam:g})"
    chart = sphere_product_chart(k, label)
    g = round_product_metric(chart, k)
    c = np.zeros(n)
    c[0] = lam
    theta = constant_field(c, (0, 1), chart, name="lambda dt")
    structure = WeylStructure(chart, g, theta, "closed-non-exact", name=label)
    sphere_ric = (k - 1) - (n - 2) / 4 * lam**2
    sphere_pos = sphere_ric - (n - 2) * (n - 4) / 8 * lam**2
    margin = min(0.0, sphere_pos)
    sphere_area = {2: 4 * np.pi, 3: 2 * np.pi**2, 5: np.pi**3}[k]
    meta = {
        "b1": 1,
        "b1_source": "topology of S^1 x S^k",
        "exactness": "closed-non-exact",
        "theorem_applicable": True,
        "expected_parallel": True,
        "gauduchon": True,
        "volume": 2 * np.pi * sphere_area,
        "ric_w_spectrum": sorted([0.0] + [sphere_ric] * k),
        "positivity_spectrum": sorted([0.0] + [sphere_pos] * k),
        "k": k * (k - 1) - (n - 1) * (n - 2) / 4 * lam**2,
        "margin": margin,
        "strict_at_theta": 0.0,
        "expected_margin_sign": int(np.sign(round(margin, 12))),
        "periods": (c / 1.0).tolist(),
        "notes": "model space of the parallel-Lee-form rigidity case" if margin >= 0 else "positivity fails",
    }
    return CatalogEntry(label, {"k": k, "lam": lam}, structure, meta)


def hopf_complex(m: int = 2) -> CatalogEntry:
    """``g = |x|^{-2} δ`` with standard ``J`` on the annulus ``1 <= |x| <= e`` of ``C^m``.

    The annulus is a fundamental domain for ``x ~ e x``; every field is
    invariant under that dilation, so single-chart evaluation is exact.
    Closed forms: ``θ = -d log|x|^2``, ``|θ|^2 = 4``, ``Ric^W = 0``.
    """
    if m not in (2, 3):
        raise ContractError(f"hopf_complex supports m = 2, 3; got {m}")
    n = 2 * m
    e = np.e
    label = f"hopf_complex({m})"

    def region(x):
        r = np.linalg.norm(np.asarray(x, dtype=float), axis=-1)
        return (r >= 1.0) & (r <= e)

    def distance(x):
        # the chart's only singular point is the origin, outside the annulus
        return np.linalg.norm(np.asarray(x, dtype=float), axis=-1)

    chart = ChartDomain((-e,) * n, (e,) * n, (False,) * n, singular_distance=distance, region=region, name=label)
    eye = np.eye(n)

    def func(x):
        r2 = np.sum(np.asarray(x, dtype=float) ** 2, axis=-1)
        return (1.0 / r2)[..., None, None] * eye

    def jac(x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x**2, axis=-1)
        df = -2 * x / r2[..., None] ** 2  # d(1/r^2)
        return np.einsum("ij,...m->...ijm", eye, df)

    def hess(x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x**2, axis=-1)[..., None, None]
        ddf = 8 * np.einsum("...m,...p->...mp", x, x) / r2**3 - 2 * eye / r2**2
        return np.einsum("ij,...mp->...ijmp", eye, ddf)

    g = MetricField(func, chart, jac=jac, hess=hess, name="|x|^-2 flat")

    def th(x):
        x = np.asarray(x, dtype=float)
        return -2 * x / np.sum(x**2, axis=-1)[..., None]

    def th_jac(x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum(x**2, axis=-1)[..., None, None]
        return -2 * eye / r2 + 4 * np.einsum("...a,...m->...am", x, x) / r2**2

    theta_closed = TensorField(th, (0, 1), chart, jac=th_jac, name="-d log|x|^2")
    structure = HermitianStructure(chart, g, standard_complex_structure(chart), name=label, theta=theta_closed)
    # Ric^W = 0; the positivity form is -(n-2)(n-4)/8 |θ|^2 on θ-orthogonal directions
    pos = -(n - 2) * (n - 4) / 8 * 4.0
    meta = {
        "b1": 1,
        "b1_source": "topology of S^1 x S^(2m-1)",
        "exactness": "closed-non-exact",
        "theorem_applicable": True,
        "expected_parallel": True,
        "gauduchon": True,
        "theta_norm2": 4.0,
        "ric_w_spectrum": [0.0] * n,
        "positivity_spectrum": sorted([0.0] + [pos] * (n - 1)),
        "k": 0.0,
        "margin": min(0.0, pos),
        "strict_at_theta": 0.0,
        "expected_margin_sign": int(np.sign(pos)),
        # value predicted by the parallel-Lee-form k^C formula, (m-1)|θ|^2
        "kc_min_eig_formula": 4.0 * (m - 1),
        "notes": "isometric to hopf_product(2m-1, 2) under t = log|x|",
    }
    return CatalogEntry(label, {"m": m}, structure, meta)


def gauge_broken_torus() -> CatalogEntry:
    """``θ = dx^1 + d(sin x^2)`` on flat ``T^3``; its co-closed gauge is ``f = -½ sin x^2``."""
    entry = flat_torus(3, (1.0,), exact_part=sin_potential(torus_chart(3), axis=1))
    entry.metadata["gauge_closed_form"] = "f = -1/2 sin x2, theta' = dx1"
    entry.metadata["expected_parallel"] = False
    return entry


BUILDERS: dict[str, Callable[..., CatalogEntry]] = {
    "flat_torus": flat_torus,
    "hopf_product": hopf_product,
    "hopf_complex": hopf_complex,
    "gauge_broken_torus": gauge_broken_torus,
}


def default_catalog() -> dict:
    """The instances the verification suites iterate over, keyed by short name."""
    entries = {
        "torus2": flat_torus(2, (1.0,)),
        "torus3": flat_torus(3, (1.0,)),
        "torus4": flat_torus(4, (1.0,)),
        "torus3_exact": flat_torus(3, ()),
        "torus3_gauge_broken": gauge_broken_torus(),
        "hopf_product_2_2": hopf_product(2, 2.0),
        "hopf_product_3_1": hopf_product(3, 1.0),
        "hopf_product_3_2": hopf_product(3, 2.0),
        "hopf_product_3_3": hopf_product(3, 3.0),
        "hopf_product_5_1": hopf_product(5, 1.0),
        "hopf_complex_2": hopf_complex(2),
        "hopf_complex_3": hopf_complex(3),
    }
    return entries


CATALOG_NAMES = (
    "torus2",
    "torus3",
    "torus4",
    "torus3_exact",
    "torus3_gauge_broken",
    "hopf_product_2_2",
    "hopf_product_3_1",
    "hopf_product_3_2",
    "hopf_product_3_3",
    "hopf_product_5_1",
    "hopf_complex_2",
    "hopf_complex_3",
)


def get_entry(name: str) -> CatalogEntry:
    if name not in CATALOG_NAMES:
        raise ContractError(f"unknown manifold {name!r}; valid names: {', '.join(CATALOG_NAMES)}")
    return default_catalog()[name]


def random_coclosed_oneform(chart: ChartDomain, rng: np.random.Generator, max_mode: int = 2, amplitude: float = 1.0) -> TrigField:
    """Random trigonometric 1-form with ``d*φ = 0`` for the flat metric on a torus chart.

    Each Fourier coefficient vector is projected orthogonally to its wave vector.
    """
    if not chart.fully_periodic:
        raise ContractError("co-closed random forms are generated on torus charts only")
    phi = TrigField.random(chart, (0, 1), rng, max_mode=max_mode, amplitude=amplitude)
    k = phi._wave
    k2 = np.sum(k**2, axis=1)
    k2 = np.where(k2 > 0, k2, 1.0)
    cos_c = phi.cos_coef - (np.sum(phi.cos_coef * k, axis=1) / k2)[:, None] * k
    sin_c = phi.sin_coef - (np.sum(phi.sin_coef * k, axis=1) / k2)[:, None] * k
    return TrigField(phi.modes, cos_c, sin_c, (0, 1), chart, name="coclosed phi")
