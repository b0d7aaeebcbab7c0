"""Property-based checks of the structural invariants."""

import json

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from weylcheck.catalog import flat_torus, hopf_product, torus_chart
from weylcheck.cli.report import CheckRecord, Report
from weylcheck.discrete import PeriodicGrid, evaluate
from weylcheck.errors import InconsistentHodgeData
from weylcheck.hermitian import hodge_relations
from weylcheck.tensor_core import TrigField, conformal_metric, covariant_derivative, flat_metric, relative_eigvalsh
from weylcheck.tensor_core.forms import alternate, inner_components, wedge_components
from weylcheck.weyl import (
    WeylStructure,
    gauge_transform,
    positivity_margin,
    ricci_weyl,
    theta_periods,
    weyl_connection,
)

SETTINGS = settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
seeds = st.integers(min_value=0, max_value=2**32 - 1)
finite = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)


def random_structure(n, seed, amplitude):
    rng = np.random.default_rng(seed)
    chart = torus_chart(n)
    f = TrigField.random(chart, (0, 0), rng, max_mode=2, amplitude=amplitude)
    theta = TrigField.random(chart, (0, 1), rng, max_mode=2)
    return WeylStructure(chart, conformal_metric(flat_metric(chart), f), theta, "non-closed"), rng


@SETTINGS
@given(seed=seeds, n=st.integers(2, 4), amp=st.floats(0.0, 0.3))
def test_connection_is_gauge_invariant(seed, n, amp):
    w, rng = random_structure(n, seed, 0.1)
    f = TrigField.random(w.chart, (0, 0), rng, max_mode=2, amplitude=amp)
    x = w.chart.sample(rng, 8)
    assert np.max(np.abs(weyl_connection(gauge_transform(w, f))(x) - weyl_connection(w)(x))) < 1e-11


@SETTINGS
@given(seed=seeds, n=st.integers(2, 4))
def test_metricity_with_theta_in_derivative_slot(seed, n):
    w, rng = random_structure(n, seed, 0.2)
    x = w.chart.sample(rng, 8)
    nab_g = covariant_derivative(weyl_connection(w)(x), w.g(x), w.g.jac(x), (0, 2))
    assert np.allclose(nab_g, np.einsum("...i,...ab->...abi", w.theta(x), w.g(x)), atol=1e-11)


@SETTINGS
@given(seed=seeds, n=st.integers(3, 4))
def test_ricci_paths_agree(seed, n):
    w, rng = random_structure(n, seed, 0.15)
    rep = ricci_weyl(w, w.chart.sample(rng, 6))
    assert np.max(rep.cross_path_residual) < 1e-8
    assert np.max(rep.trace_residual) < 1e-8


@SETTINGS
@given(n=st.integers(3, 6), c=arrays(float, 3, elements=finite))
def test_flat_torus_margin_closed_form(n, c):
    w = flat_torus(n, tuple(c)).weyl
    x = w.chart.sample(np.random.default_rng(0), 4)
    margin, strict = positivity_margin(w, x)
    c2 = float(np.sum(c**2))
    assert np.allclose(margin, -((n - 2) ** 2) / 8 * c2, atol=1e-12)
    assert np.allclose(strict, 0.0, atol=1e-12)


@SETTINGS
@given(lam=st.floats(0.1, 4.0), k=st.sampled_from([2, 3]))
def test_sphere_product_scalar_curvature(lam, k):
    w = hopf_product(k, lam).weyl
    rep = ricci_weyl(w, w.chart.sample(np.random.default_rng(1), 5))
    n = k + 1
    assert np.allclose(rep.k, k * (k - 1) - (n - 1) * (n - 2) / 4 * lam**2, atol=1e-8)


@SETTINGS
@given(seed=seeds, amp=st.floats(0.0, 0.5))
def test_gauge_preserves_periods(seed, amp):
    w = flat_torus(3, (1.0, -0.5)).weyl
    rng = np.random.default_rng(seed)
    f = TrigField.random(w.chart, (0, 0), rng, max_mode=2, amplitude=amp)
    grid = PeriodicGrid(w.chart, 8)
    assert np.allclose(theta_periods(gauge_transform(w, f), grid), [1.0, -0.5, 0.0], atol=1e-12)
    assert np.allclose(theta_periods(w, grid, evaluate(f, grid.points)), [1.0, -0.5, 0.0], atol=1e-12)


@SETTINGS
@given(seed=seeds, n=st.integers(2, 5))
def test_relative_eigenvalues_congruence_invariant(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + n * np.eye(n)
    q = rng.standard_normal((n, n))
    q = q + q.T
    g = a @ a.T
    p = rng.standard_normal((n, n)) + n * np.eye(n)
    assert np.allclose(relative_eigvalsh(q, g), relative_eigvalsh(p @ q @ p.T, p @ g @ p.T), atol=1e-8)


@SETTINGS
@given(seed=seeds, n=st.integers(2, 5))
def test_wedge_graded_commutative(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal(n)
    b = alternate(rng.standard_normal((n, n)), 2)
    ab = wedge_components(a, 1, b, 2)
    ba = wedge_components(b, 2, a, 1)
    assert np.allclose(ab, ba, atol=1e-12)  # (-1)^{1*2} = 1
    assert np.allclose(alternate(ab, 3), ab, atol=1e-12)
    c = rng.standard_normal(n)
    assert np.allclose(wedge_components(a, 1, c, 1), -wedge_components(c, 1, a, 1))


@SETTINGS
@given(seed=seeds, n=st.integers(2, 5), k=st.integers(1, 3))
def test_form_inner_product_positive(seed, n, k):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + n * np.eye(n)
    gi = np.linalg.inv(m @ m.T)
    alpha = alternate(rng.standard_normal((n,) * k), k)
    assert inner_components(gi, alpha, alpha, k) >= -1e-12


@SETTINGS
@given(m=st.integers(2, 6), h1=st.integers(0, 5), data=st.data())
def test_hodge_relations_odd_b1(m, h1, data):
    rest = data.draw(st.lists(st.integers(0, 4), min_size=m - 2, max_size=m - 2))
    h = [h1] + rest + [rest[-1] if rest else h1]
    prof = hodge_relations(m, h)
    assert prof.b1 % 2 == 1 and prof.b1 == 2 * h1 + 1
    assert prof.h_0q[0] == h1 + 1
    assert prof.h_0q[-1] == prof.h_p0[-1]
    even = data.draw(st.integers(0, 10).map(lambda v: 2 * v))
    try:
        hodge_relations(m, [None] * m, b1_hint=even)
    except InconsistentHodgeData:
        pass
    else:
        raise AssertionError(f"even b1 = {even} accepted")


@SETTINGS
@given(
    rows=st.lists(
        st.tuples(st.sampled_from(["a.x", "b.y", "c.z"]), st.sampled_from(["m1", "m2"]), st.floats(0, 1)),
        min_size=1,
        max_size=12,
    ),
    seed=seeds,
)
def test_report_order_independent(rows, seed):
    recs = [CheckRecord(cid, "anchor", man, 1, res, 0.5) for cid, man, res in rows]
    perm = np.random.default_rng(seed).permutation(len(recs))
    r1, r2 = Report(environment={"seed": 1}), Report(environment={"seed": 1})
    for r in recs:
        r1.add(r)
    for i in perm:
        r2.add(recs[i])
    assert [(r.check_id, r.manifold) for r in r1.sorted_records()] == [(r.check_id, r.manifold) for r in r2.sorted_records()]
    data = json.loads(r1.to_json())
    assert data["summary"]["total"] == len(rows)
    assert data["summary"]["pass"] == sum(1 for _, _, res in rows if res <= 0.5)
