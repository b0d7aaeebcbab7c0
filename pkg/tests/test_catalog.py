import numpy as np
import pytest

from weylcheck.catalog import (
    BUILDERS,
    CATALOG_NAMES,
    default_catalog,
    flat_torus,
    gauge_broken_torus,
    get_entry,
    hopf_complex,
    hopf_product,
    random_coclosed_oneform,
    torus_chart,
)
from weylcheck.discrete import PeriodicGrid
from weylcheck.errors import ContractError
from weylcheck.tensor_core import codiff, flat_metric, sin_potential
from weylcheck.weyl import codiff_theta_on_grid, positivity_margin, ricci_spectrum, ricci_weyl, theta_periods


@pytest.fixture(scope="module")
def catalog():
    return default_catalog()


def test_registry(catalog):
    assert tuple(catalog) == CATALOG_NAMES
    assert set(BUILDERS) == {"flat_torus", "hopf_product", "hopf_complex", "gauge_broken_torus"}
    with pytest.raises(ContractError, match="valid names"):
        get_entry("klein_bottle")


@pytest.mark.parametrize("name", [n for n in CATALOG_NAMES if n != "hopf_product_5_1"])
def test_metadata_matches_computation(name, catalog, rng):
    entry = catalog[name]
    meta = entry.metadata
    if "margin" not in meta:
        pytest.skip("no curvature metadata")
    w = entry.weyl
    x = entry.chart.sample(rng, 20)
    margin, strict = positivity_margin(w, x)
    assert np.max(np.abs(margin - meta["margin"])) < 1e-6
    assert np.max(np.abs(strict - meta["strict_at_theta"])) < 1e-6
    assert np.max(np.abs(ricci_spectrum(w, x) - np.asarray(meta["ric_w_spectrum"]))) < 1e-6
    assert np.max(np.abs(ricci_weyl(w, x).k - meta["k"])) < 1e-6


def test_flat_torus_tags():
    assert flat_torus(3, ()).metadata["exactness"] == "exact"
    e = flat_torus(3, (1.0, 2.0))
    assert e.metadata["exactness"] == "closed-non-exact"
    assert e.metadata["b1"] == 3
    with pytest.raises(ContractError, match="scalar potential"):
        flat_torus(3, (1.0,), exact_part=random_coclosed_oneform(torus_chart(3), np.random.default_rng(0)))
    assert flat_torus(3, (1.0,), exact_part=sin_potential(torus_chart(3), 0)).metadata["gauduchon"] is False


def test_hopf_product_arguments():
    with pytest.raises(ContractError):
        hopf_product(4, 1.0)
    with pytest.raises(ContractError):
        hopf_product(3, 0.0)
    assert hopf_product(3, 3.0).metadata["margin"] < 0
    assert hopf_product(3, 2.0).metadata["margin"] == 0.0
    assert hopf_product(3, 1.0).metadata["margin"] == 0.0


def test_hopf_complex_arguments():
    with pytest.raises(ContractError):
        hopf_complex(4)
    e = hopf_complex(3)
    assert e.hermitian.m == 3
    assert e.metadata["margin"] == pytest.approx(-4.0)


def test_hopf_complex_region(rng):
    chart = hopf_complex(2).chart
    x = chart.sample(rng, 200)
    r = np.linalg.norm(x, axis=-1)
    assert np.all((r >= 1.0) & (r <= np.e))


def test_gauge_broken_torus_is_not_coclosed():
    e = gauge_broken_torus()
    grid = PeriodicGrid(e.chart, 12)
    assert np.max(np.abs(codiff_theta_on_grid(e.weyl, grid))) > 0.5
    assert np.allclose(theta_periods(e.weyl, grid), [1.0, 0.0, 0.0], atol=1e-12)


def test_random_coclosed_form(rng):
    chart = torus_chart(3)
    phi = random_coclosed_oneform(chart, rng)
    x = chart.sample(rng, 20)
    assert np.max(np.abs(codiff(flat_metric(chart), phi)(x))) < 1e-12
    with pytest.raises(ContractError):
        random_coclosed_oneform(hopf_product(2, 1.0).chart, rng)
