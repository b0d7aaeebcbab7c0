import numpy as np
import pytest

from oracles import FROZEN
from weylcheck.catalog import hopf_complex, torus_chart
from weylcheck.errors import ContractError, InconsistentHodgeData, PreconditionError, UnsupportedError
from weylcheck.hermitian import (
    VANISHING_LABEL,
    HermitianStructure,
    chern_compatibility,
    chern_k,
    gh_structure_residuals,
    hodge_relations,
    lck_residual,
    lee_form,
    standard_complex_structure,
    vanishing_profile,
)
from weylcheck.tensor_core import (
    MetricField,
    TrigField,
    conformal_metric,
    flat_metric,
    levi_civita,
    relative_eigvalsh,
    ricci,
)


@pytest.fixture(scope="module", params=[2, 3])
def hopf(request):
    return hopf_complex(request.param)


def surface_product_metric(chart, u, v):
    """``e^{2u(x0,x1)}`` on the first complex line, ``e^{2v(x2,x3)}`` on the second: Kähler."""

    def diag(x):
        a = np.exp(2 * u(x[..., :2]))
        b = np.exp(2 * v(x[..., 2:]))
        out = np.zeros(x.shape[:-1] + (4, 4))
        out[..., 0, 0] = out[..., 1, 1] = a
        out[..., 2, 2] = out[..., 3, 3] = b
        return out

    return MetricField(diag, chart, name="product")


def test_structure_contracts():
    chart = torus_chart(3)
    with pytest.raises(ContractError):
        HermitianStructure(chart, flat_metric(chart), standard_complex_structure(torus_chart(4)))
    chart4 = torus_chart(4)
    with pytest.raises(ContractError):
        HermitianStructure(chart4, flat_metric(chart4), flat_metric(chart4))


def test_hopf_structure_and_lee_form(hopf, rng):
    h = hopf.hermitian
    x = hopf.chart.sample(rng, 40)
    for res in h.structure_residuals(x).values():
        assert np.max(res) < 1e-13
    # closed form of the Lee form: -2x/|x|^2
    expected = -2 * x / np.sum(x**2, axis=-1, keepdims=True)
    assert np.max(np.abs(lee_form(h, x) - expected)) < 1e-12
    res, dth = lck_residual(h, x)
    assert np.max(res) < 1e-10 and np.max(dth) < 1e-6


def test_chern_connection(hopf, rng):
    x = hopf.chart.sample(rng, 20)
    comp = chern_compatibility(hopf.hermitian, x)
    for key in ("metric", "complex", "two_route"):
        assert np.max(comp[key]) < 1e-6, key


def test_chern_curvature_relations(hopf, rng):
    x = hopf.chart.sample(rng, 20)
    rep = chern_k(hopf.hermitian, x)
    assert np.max(rep.frame_residual) < 1e-8
    assert np.max(rep.curvature_relation_residual) < 1e-5
    assert np.max(rep.kc_relation_residual) < 1e-5


def test_kc_eigenvalue_matches_complex_coordinate_oracle(hopf, rng):
    m = hopf.hermitian.m
    x = hopf.chart.sample(rng, 20)
    gh = gh_structure_residuals(hopf.hermitian, x)
    assert np.max(np.abs(gh.kc_min_eig - FROZEN["kc_min_eig_computed"][m])) < 1e-5
    assert np.max(gh.lee_differential_residual) < 1e-5
    assert np.max(gh.nabla_theta) < 1e-8


def test_kc_is_ricci_for_kaehler_products(rng):
    chart = torus_chart(4)
    u = TrigField.random(torus_chart(2), (0, 0), rng, max_mode=2, amplitude=0.2)
    v = TrigField.random(torus_chart(2), (0, 0), rng, max_mode=2, amplitude=0.2)
    g = surface_product_metric(chart, u, v)
    h = HermitianStructure(chart, g, standard_complex_structure(chart), "kaehler")
    x = chart.sample(rng, 10)
    rep = chern_k(h, x)
    ric = ricci(levi_civita(g), x)
    assert np.max(np.abs(rep.kc - ric)) < 1e-5


def test_non_lck_structure_rejected(rng):
    chart = torus_chart(6)
    a = TrigField.random(torus_chart(2), (0, 0), rng, max_mode=1, amplitude=0.5)

    def func(x):
        out = np.broadcast_to(np.eye(6), x.shape[:-1] + (6, 6)).copy()
        out[..., 0, 0] = out[..., 1, 1] = np.exp(a(x[..., 2:4]))
        return out

    h = HermitianStructure(chart, MetricField(func, chart), standard_complex_structure(chart), "non-lck")
    x = chart.sample(rng, 5)
    res, _ = lck_residual(h, x)
    assert np.max(res) > 1e-3
    with pytest.raises(PreconditionError, match="not Hermitian-Weyl"):
        chern_k(h, x)


def test_non_parallel_lee_form_rejected(rng):
    chart = torus_chart(4)
    f = TrigField.random(chart, (0, 0), rng, max_mode=1, amplitude=0.2)
    h = HermitianStructure(chart, conformal_metric(flat_metric(chart), f), standard_complex_structure(chart), "gck")
    x = chart.sample(rng, 5)
    assert np.max(lck_residual(h, x)[0]) < 1e-8  # conformally Kähler, so lcK
    with pytest.raises(PreconditionError, match="not parallel"):
        gh_structure_residuals(h, x)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_hodge_profile_from_vanishing(m):
    prof = hodge_relations(m, [0] * m)
    assert prof.b1 == 1
    assert prof.h_0q == [1] + [0] * (m - 1)


def test_hodge_relations_fill_missing_entries():
    prof = hodge_relations(3, [None, 2, None], b1_hint=5)
    assert prof.h_p0 == [2, 2, 2]
    assert prof.b1 == 5
    assert prof.h_0q == [3, 4, 2]


@pytest.mark.parametrize("b1", [2, 4, 6, 8, 10])
def test_even_b1_contradiction(b1):
    with pytest.raises(InconsistentHodgeData, match="odd"):
        hodge_relations(3, [None] * 3, b1_hint=b1)


def test_hodge_input_errors():
    with pytest.raises(InconsistentHodgeData):
        hodge_relations(3, [1, 0, 1])
    with pytest.raises(InconsistentHodgeData):
        hodge_relations(2, [1, 1], b1_hint=1)
    with pytest.raises(ContractError):
        hodge_relations(2, [-1, 0])
    with pytest.raises(ContractError):
        hodge_relations(2, [0, 0, 0])
    with pytest.raises(UnsupportedError):
        hodge_relations(1, [0])


def test_vanishing_profile_labels():
    assert vanishing_profile(2, 0.0) is None
    prof = vanishing_profile(3, 4.0)
    assert prof.b1 == 1
    assert set(prof.labels.values()) == {VANISHING_LABEL}


def test_relative_eigvalsh_consistent_with_scaling(rng):
    g = np.diag([2.0, 3.0])
    q = np.diag([4.0, 3.0])
    assert np.allclose(relative_eigvalsh(q, g), [1.0, 2.0])
