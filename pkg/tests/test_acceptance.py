"""Exit criteria of the verification engine, each at its stated tolerance.

Every test prints one ``criterion N [PASS|FAIL]`` line (also collected in the
terminal summary) before asserting.  Targets come from the symbolic oracles in
``oracles.py``.
"""

import json

import numpy as np
import pytest

from oracles import FROZEN
from weylcheck.catalog import (
    CATALOG_NAMES,
    default_catalog,
    flat_torus,
    hopf_complex,
    hopf_product,
    torus_chart,
)
from weylcheck.cli import coverage_audit, main
from weylcheck.cli.report import CheckRecord, Report
from weylcheck.discrete import PeriodicGrid, b1_estimate, evaluate
from weylcheck.errors import InconsistentHodgeData
from weylcheck.hermitian import chern_compatibility, chern_k, gh_structure_residuals, hodge_relations, lck_residual
from weylcheck.tensor_core import TrigField, conformal_metric, flat_metric
from weylcheck.weyl import (
    BochnerQuadrature,
    b1_bound_violations,
    gauduchon_gauge,
    gauge_transform,
    positivity_margin,
    positivity_spectrum,
    ricci_spectrum,
    ricci_weyl,
    theta_periods,
    tilde_norm_identity,
    weitzenbock_terms,
)

pytestmark = pytest.mark.acceptance

SEED = 20240601
POINTS = 100


def sample(entry, salt):
    return entry.chart.sample(np.random.default_rng([SEED, salt]), POINTS)


def verdict(log, number, title, ok, detail):
    log(f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")


def test_criterion_1_cross_path_ricci(criterion_log):
    entries = [flat_torus(4, (1.0,))] + [hopf_product(3, lam) for lam in (1.0, 2.0, 3.0)] + [hopf_complex(2), hopf_complex(3)]
    worst = {}
    for i, e in enumerate(entries):
        worst[e.name] = float(np.max(ricci_weyl(e.weyl, sample(e, i)).cross_path_residual))
    top = max(worst.values())
    ok = top <= 1e-5
    verdict(criterion_log, 1, "cross-path Ricci", ok, f"max relative residual {top:.2e} over {len(entries)} manifolds (tol 1e-5)")
    assert ok, worst


def test_criterion_2_scalar_consistency(criterion_log):
    t4 = flat_torus(4, (1.0,))
    rep = ricci_weyl(t4.weyl, sample(t4, 0))
    trace_res = [float(np.max(rep.trace_residual))]
    target_err = [float(np.max(np.abs(rep.k - FROZEN["torus4_k"])))]
    for lam in (1.0, 2.0, 3.0):
        e = hopf_product(3, lam)
        r = ricci_weyl(e.weyl, sample(e, int(lam)))
        trace_res.append(float(np.max(r.trace_residual)))
        target_err.append(float(np.max(np.abs(r.k - FROZEN["hopf3_k"](lam)))))
    ok = max(trace_res) <= 1e-5 and max(target_err) <= 1e-5
    verdict(
        criterion_log, 2, "scalar consistency", ok,
        f"trace residual {max(trace_res):.2e}, closed-form k error {max(target_err):.2e} (tol 1e-5)",
    )
    assert ok


def test_criterion_3_positivity_ledger(criterion_log):
    errs = {}
    t4 = flat_torus(4, (1.0,))
    m, _ = positivity_margin(t4.weyl, sample(t4, 0))
    errs["T4 margin"] = float(np.max(np.abs(m - FROZEN["torus4_margin"])))
    s3 = hopf_product(3, 1.0)
    x = sample(s3, 1)
    m, _ = positivity_margin(s3.weyl, x)
    errs["S1xS3 margin"] = float(np.max(np.abs(m - FROZEN["hopf3_lambda1_margin"])))
    errs["S1xS3 sphere eigenvalue"] = float(np.max(np.abs(positivity_spectrum(s3.weyl, x)[..., -1] - 1.5)))
    hc = hopf_complex(2)
    x = sample(hc, 2)
    m, _ = positivity_margin(hc.weyl, x)
    errs["hopf_complex(2) margin"] = float(np.max(np.abs(m)))
    errs["hopf_complex(2) Ric^W spectrum"] = float(np.max(np.abs(ricci_spectrum(hc.weyl, x) - FROZEN["hopf_complex_ric_w"])))

    catalog = default_catalog()
    strict_hopf = 0.0
    violations = []
    for i, name in enumerate(CATALOG_NAMES):
        e = catalog[name]
        if "margin" not in e.metadata:
            continue
        margin, strict = positivity_margin(e.weyl, sample(e, 10 + i))
        if name.startswith("hopf"):
            strict_hopf = max(strict_hopf, float(np.max(np.abs(strict))))
        violations += b1_bound_violations(
            name, e.weyl.n, e.metadata["b1"], e.metadata["exactness"], float(np.min(margin)), float(np.max(strict))
        )
    errs["strict_at_theta on Hopf entries"] = strict_hopf
    ok = max(errs.values()) <= 1e-5 and not violations
    verdict(
        criterion_log, 3, "positivity ledger", ok,
        f"max target error {max(errs.values()):.2e} (tol 1e-5), theorem audit violations {len(violations)}",
    )
    assert ok, (errs, violations)


def test_criterion_4_bochner_identities(criterion_log):
    catalog = default_catalog()
    pointwise = 0.0
    for i, name in enumerate(CATALOG_NAMES):
        e = catalog[name]
        rng = np.random.default_rng([SEED, 40 + i])
        x = e.chart.sample(rng, POINTS)
        for _ in range(20):
            xi = TrigField.random(e.chart, (1, 0), rng, max_mode=2)
            pointwise = max(pointwise, float(np.max(tilde_norm_identity(e.weyl, xi, x))))

    global_res = {}
    defect_share = {}
    for n, num in ((2, 64), (3, 32)):
        w = flat_torus(n, (1.0,)).weyl
        quad = BochnerQuadrature(w, PeriodicGrid(w.chart, num))
        rng = np.random.default_rng([SEED, 400 + n])
        res, share = [], []
        for _ in range(10):
            t = quad.terms(TrigField.random(w.chart, (0, 1), rng, max_mode=2))
            res.append(t["residual"])
            share.append(abs(t["defect"]) / t["scale"])
        global_res[f"T{n}"] = max(res)
        defect_share[f"T{n}"] = max(share)

    s3 = hopf_product(3, 1.0)
    balanced = weitzenbock_terms(s3.weyl, s3.weyl.theta, PeriodicGrid(s3.chart, 12))["residual"]

    ok = pointwise <= 1e-6 and max(global_res.values()) <= 1e-4 and balanced <= 1e-6
    detail = (
        f"pointwise {pointwise:.2e} (tol 1e-6); global T2 {global_res['T2']:.2e}, T3 {global_res['T3']:.2e} "
        f"(tol 1e-4); phi = theta on S1xS3 {balanced:.2e} (tol 1e-6)"
    )
    if not ok:
        detail += (
            f"; the T3 imbalance equals the cross term (n-2)/2 int theta(phi#) d*phi "
            f"({defect_share['T3']:.2e} of scale), so the integrated identity needs d*phi = 0 for n >= 3"
        )
    verdict(criterion_log, 4, "Bochner identities", ok, detail)
    assert ok


def _round_trip(num, amplitude, salt):
    w = flat_torus(3, (1.0,)).weyl
    grid = PeriodicGrid(w.chart, num)
    rng = np.random.default_rng([SEED, salt])
    f0 = TrigField.random(w.chart, (0, 0), rng, max_mode=2, amplitude=amplitude, zero_mean=True)
    broken = gauge_transform(w, f0)
    sol = gauduchon_gauge(broken, grid)
    err = float(np.max(np.abs(sol.f + evaluate(f0, grid.points))))
    before = theta_periods(broken, grid)
    after = theta_periods(broken, grid, sol.f)
    period_err = float(np.max(np.abs(after - before)))
    sup = float(np.max(np.abs(evaluate(f0, grid.points))))
    return err, sol.residual, period_err, sup


def test_criterion_5_gauge_round_trip(criterion_log):
    err, res, per, sup = _round_trip(32, 0.05, 5)
    ok = err <= 1e-5 and res <= 1e-6 and per <= 1e-6
    verdict(
        criterion_log, 5, "co-closed gauge round trip (32^3)", ok,
        f"sup|f - f0| {err:.2e} (tol 1e-5), ||d*theta'|| {res:.2e} (tol 1e-6), period drift {per:.2e}, sup|f0| {sup:.2f}",
    )
    assert ok


@pytest.mark.slow
def test_criterion_5_gauge_round_trip_fine_grid(criterion_log):
    err, res, per, sup = _round_trip(64, 0.1, 6)
    ok = err <= 1e-5 and res <= 1e-6 and per <= 1e-6
    verdict(
        criterion_log, "5b", "co-closed gauge round trip (64^3)", ok,
        f"sup|f - f0| {err:.2e} (tol 1e-5), ||d*theta'|| {res:.2e} (tol 1e-6), period drift {per:.2e}, sup|f0| {sup:.2f}",
    )
    assert ok


def test_criterion_6_hermitian_suite(criterion_log):
    res = {}
    kc_err = 0.0
    observed = {}
    for m in (2, 3):
        e = hopf_complex(m)
        h = e.hermitian
        x = sample(e, 60 + m)
        lck, _ = lck_residual(h, x)
        rep = chern_k(h, x)
        gh = gh_structure_residuals(h, x)
        comp = chern_compatibility(h, x)
        for key, arr in (
            ("lck", lck),
            ("chern-weyl curvature relation", rep.curvature_relation_residual),
            ("k^C relation", rep.kc_relation_residual),
            ("Lee differential", gh.lee_differential_residual),
            ("k^C closed formula", gh.kc_formula_residual),
            ("nabla^C g", comp["metric"]),
            ("nabla^C J", comp["complex"]),
        ):
            res[key] = max(res.get(key, 0.0), float(np.max(arr)))
        kc_err = max(kc_err, float(np.max(np.abs(gh.kc_min_eig - FROZEN["kc_min_eig_formula"][m]))))
        observed[m] = float(np.min(gh.kc_min_eig))
    failing = [k for k, v in res.items() if v > 1e-5]
    ok = not failing and kc_err <= 1e-4
    detail = f"max residual {max(res.values()):.2e} (tol 1e-5), k^C eigenvalue error {kc_err:.2e} (tol 1e-4)"
    if not ok:
        detail += (
            f"; failing: {', '.join(failing) or 'none'}; computed k^C eigenvalues m=2: {observed[2]:.6f}, "
            f"m=3: {observed[3]:.6f} against targets 4 and 8. The complex-coordinate oracle gives 2(m-1), "
            "and k^C = Ric on Kaehler products pins the normalization"
        )
    verdict(criterion_log, 6, "Hermitian suite", ok, detail)
    assert ok, res


def test_criterion_7_hodge_arithmetic(criterion_log):
    profiles_ok = True
    for m in (2, 3, 4, 5):
        prof = hodge_relations(m, [0] * m)
        profiles_ok &= prof.b1 == 1 and prof.h_p0 == [0] * m and prof.h_0q == [1] + [0] * (m - 1)
    accepted = []
    for m in (2, 3, 4):
        for b1 in range(2, 11, 2):
            try:
                hodge_relations(m, [None] * m, b1_hint=b1)
                accepted.append((m, b1))
            except InconsistentHodgeData:
                pass
    ok = profiles_ok and not accepted
    verdict(criterion_log, 7, "Hodge arithmetic", ok, f"profiles reproduced {profiles_ok}, even b1 accepted {accepted}")
    assert ok


def test_criterion_8_spectral_b1(criterion_log):
    results = {}
    results["T2"] = b1_estimate(PeriodicGrid(torus_chart(2), 32))
    results["T3"] = b1_estimate(PeriodicGrid(torus_chart(3), 12))
    chart = torus_chart(3)
    f = TrigField.random(chart, (0, 0), np.random.default_rng([SEED, 8]), max_mode=2, amplitude=0.1, zero_mean=True)
    results["conformal T3"] = b1_estimate(PeriodicGrid(chart, 12), conformal_metric(flat_metric(chart), f))
    expected = {"T2": 2, "T3": 3, "conformal T3": 3}
    ok = all(r.determinate and r.count == expected[k] and r.gap_ratio >= 10 for k, r in results.items())
    detail = ", ".join(f"{k}: {r.count} (gap {r.gap_ratio:.1e})" for k, r in results.items())
    verdict(criterion_log, 8, "spectral b1", ok, detail)
    assert ok


def test_criterion_9_determinism_and_coverage(criterion_log, tmp_path, capsys):
    texts = []
    for i in range(2):
        out = tmp_path / f"report{i}.json"
        main(["run", "--out", str(out), "--format", "json"])
        capsys.readouterr()
        texts.append(out.read_text())
    lines = [t.splitlines() for t in texts]
    differing = [a for a, b in zip(*lines) if a != b]
    identical = len(lines[0]) == len(lines[1]) and all('"timestamp"' in a for a in differing)
    data = json.loads(texts[0])
    report = Report(records=[CheckRecord(**{k: v for k, v in r.items()}) for r in data["records"]])
    missing = coverage_audit(report)
    ok = identical and not missing
    verdict(
        criterion_log, 9, "determinism and coverage", ok,
        f"byte-identical modulo timestamp {identical}, {data['summary']['total']} records, anchors missing {missing}",
    )
    assert ok
