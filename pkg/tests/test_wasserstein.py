import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.linalg import sqrtm

from gdiff import EXACT_PT, STANDARD_NORMAL, CovarianceSpectrum, DomainError, NoiseSchedule, SamplerConfig
from gdiff.schemes import recursion_values
from gdiff.wasserstein import (ablation_table, continuous_counterpart, curve_csv_text, eigen_contribution,
                               empirical_spectrum_in_basis, error_curve, final_error, plot_curves_svg,
                               read_curve_csv, table_csv_text, w2_diag, write_curve_csv)

LINEAR = NoiseSchedule()


def bures(A, B):
    ra = sqrtm(A)
    cross = sqrtm(ra @ B @ ra)
    return float(np.sqrt(max(np.trace(A) + np.trace(B) - 2 * np.trace(cross).real, 0.0)))


def test_w2_diag_matches_dense_bures():
    rng = np.random.default_rng(7)
    for _ in range(30):
        d = int(rng.integers(1, 6))
        q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        a, b = rng.uniform(0.01, 10, d), rng.uniform(0.01, 10, d)
        assert w2_diag(a, b) == pytest.approx(bures(q @ np.diag(a) @ q.T, q @ np.diag(b) @ q.T), abs=1e-9)


def test_w2_diag_basics():
    assert w2_diag([4.0, 1.0], [1.0, 1.0]) == pytest.approx(1.0)
    assert w2_diag(CovarianceSpectrum([2.0]), [2.0]) == 0.0
    with pytest.raises(DomainError):
        w2_diag([1.0], [1.0, 2.0])


@settings(max_examples=100)
@given(st.integers(1, 5).flatmap(lambda d: st.tuples(*[arrays(float, d, elements=st.floats(0, 50))] * 3)))
def test_w2_diag_is_a_metric(triple):
    a, b, c = triple
    assert w2_diag(a, b) == pytest.approx(w2_diag(b, a))
    assert w2_diag(a, c) <= w2_diag(a, b) + w2_diag(b, c) + 1e-9
    assert w2_diag(a, a) == 0.0


def test_error_curve_shape_and_all_ones():
    cfg = SamplerConfig("heun", 1000, 1e-3, STANDARD_NORMAL, LINEAR)
    curve = error_curve("heun", np.ones(4), cfg)
    assert curve.times.size == 1001
    assert np.all(curve.values == 0.0)


def test_curve_with_exact_init_is_zero_for_continuous():
    cfg = SamplerConfig("heun", 50, 0.0, EXACT_PT, LINEAR)
    for src in ("continuous_sde", "continuous_ode"):
        assert np.max(error_curve(src, [0.0, 0.3, 9.0], cfg).values) < 1e-12


def test_error_curve_endpoint_against_forward_law():
    lam = np.array([0.2, 5.0])
    cfg = SamplerConfig("em", 30, 1e-2, STANDARD_NORMAL, LINEAR)
    vals = recursion_values("em", lam, cfg)
    curve = error_curve("em", lam, cfg)
    lam_T = np.exp(-2 * LINEAR.B(1.0)) * lam + 1 - np.exp(-2 * LINEAR.B(1.0))
    assert curve.values[0] == pytest.approx(w2_diag(np.ones(2), lam_T))
    lam_eps = np.exp(-2 * LINEAR.B(1e-2)) * lam + 1 - np.exp(-2 * LINEAR.B(1e-2))
    assert curve.values[-1] == pytest.approx(w2_diag(vals[-1], lam_eps))


def test_final_error_is_against_data_law():
    lam = np.array([0.2, 5.0])
    cfg = SamplerConfig("euler", 30, 1e-2, STANDARD_NORMAL, LINEAR)
    assert final_error("euler", lam, cfg) == pytest.approx(w2_diag(recursion_values("euler", lam, cfg)[-1], lam))


def test_ablation_layout_and_special_cells():
    cells = ablation_table([3.0, 0.5, 0.0])
    assert len(cells) == 4 * 5 * 4 * 2
    by_key = {(c.scheme, c.N, c.eps, c.init): c for c in cells}
    for scheme in ("em", "ei", "euler", "heun"):
        assert by_key[(scheme, "continuous", 0.0, "pT")].w2 == pytest.approx(0.0, abs=1e-12)
    for N in (50, 250, 500, 1000):
        assert by_key[("heun", N, 0.0, "pT")].w2 is None
        assert not by_key[("heun", N, 0.0, "N0")].defined
        assert by_key[("heun", N, 1e-5, "N0")].defined
        assert by_key[("euler", N, 0.0, "N0")].defined


def test_ablation_single_unit_eigenvalue():
    cells = ablation_table([1.0])
    for c in cells:
        if c.scheme in ("em", "ei") and c.N != "continuous":
            cfg = SamplerConfig(c.scheme, c.N, c.eps, EXACT_PT if c.init == "pT" else STANDARD_NORMAL, LINEAR)
            expected = abs(1.0 - np.sqrt(recursion_values(c.scheme, np.array([1.0]), cfg)[-1, 0]))
            assert c.w2 == pytest.approx(expected, rel=1e-12)
            assert 0 < c.w2 < 0.2
        else:
            assert c.w2 == pytest.approx(0.0, abs=1e-12)


def test_continuous_counterpart():
    assert continuous_counterpart("em") == "continuous_sde"
    assert continuous_counterpart("heun") == "continuous_ode"


def test_eigen_contribution_marks_undefined_points():
    cfg = SamplerConfig("heun", 100, 0.0, STANDARD_NORMAL, LINEAR)
    out = eigen_contribution("heun", [0.0, 1.0, 10.0], cfg)
    assert np.isnan(out[0]) and np.all(np.isfinite(out[1:]))
    cfg = SamplerConfig("heun", 100, 1e-3, STANDARD_NORMAL, LINEAR)
    lam = np.geomspace(1e-6, 1e3, 20)
    out = eigen_contribution("heun", lam, cfg)
    assert np.all(out >= 0)
    assert np.sqrt(np.sum(out**2)) == pytest.approx(final_error("heun", lam, cfg))


def test_empirical_spectrum_in_basis():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((100_000, 2)) * [1.0, 3.0]
    assert empirical_spectrum_in_basis(x).eigenvalues == pytest.approx([1.0, 9.0], rel=0.02)
    with pytest.raises(DomainError):
        empirical_spectrum_in_basis(np.ones((1, 2)))


def test_csv_outputs(tmp_path):
    cfg = SamplerConfig("ei", 10, 1e-3, STANDARD_NORMAL, LINEAR)
    curve = error_curve("ei", [0.5, 2.0], cfg)
    path = tmp_path / "c.csv"
    write_curve_csv(curve, path)
    assert path.read_text() == curve_csv_text(curve)
    back = read_curve_csv(path)[0]
    assert np.array_equal(back.values, curve.values)
    assert curve_csv_text(curve).splitlines()[0] == "tau,w2,label"
    text = table_csv_text(ablation_table([1.0, 0.0], N_list=(10,), eps_list=(0.0,)))
    assert text.splitlines()[0] == "scheme,N,eps,init,w2"
    assert "heun,10,0.0,pT,undefined" in text


def test_svg_rendering(tmp_path):
    pytest.importorskip("matplotlib")
    cfg = SamplerConfig("heun", 20, 1e-3, STANDARD_NORMAL, LINEAR)
    path = tmp_path / "c.svg"
    plot_curves_svg(error_curve("heun", [0.5, 2.0], cfg), path)
    assert path.read_text().lstrip().startswith("<?xml")
