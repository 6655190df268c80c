import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gdiff import CovarianceSpectrum, DomainError, IngestError, NoiseSchedule, NumericError
from gdiff.spectrum import (empirical_spectrum, forward_eigen, forward_spectrum, load_samples_csv, load_spectrum_csv,
                            save_spectrum_csv, synthetic_spectrum)


def test_spectrum_is_immutable_and_validated():
    spec = CovarianceSpectrum([3.0, 1.0])
    with pytest.raises(ValueError):
        spec.eigenvalues[0] = 5.0
    with pytest.raises(DomainError):
        CovarianceSpectrum([1.0, -0.1])
    with pytest.raises(DomainError):
        CovarianceSpectrum([np.nan])


def test_sorted_constructor_orders_descending():
    assert list(CovarianceSpectrum.sorted([1.0, 5.0, 0.0]).eigenvalues) == [5.0, 1.0, 0.0]


def test_csv_roundtrip(tmp_path):
    path = tmp_path / "s.csv"
    save_spectrum_csv(CovarianceSpectrum([2.5, 1e-7, 0.0]), path)
    assert load_spectrum_csv(path) == CovarianceSpectrum([2.5, 1e-7, 0.0])


def test_csv_skips_blank_lines_and_sorts(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("1\n\n 3 \n2\n")
    assert list(load_spectrum_csv(path).eigenvalues) == [3.0, 2.0, 1.0]


@pytest.mark.parametrize("content, where", [("1\nabc\n", ":2"), ("1\n-2\n", ":2"), ("nan\n", ":1"), ("\n\n", "empty")])
def test_csv_errors_name_the_line(tmp_path, content, where):
    path = tmp_path / "bad.csv"
    path.write_text(content)
    with pytest.raises(IngestError, match=where):
        load_spectrum_csv(path)


def test_missing_file_is_ingest_error(tmp_path):
    with pytest.raises(IngestError):
        load_spectrum_csv(tmp_path / "nope.csv")


def test_empirical_spectrum_of_known_covariance():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    data = rng.standard_normal((200_000, 4)) * np.sqrt([4.0, 2.0, 1.0, 0.25]) @ q.T + 7.0
    lam = empirical_spectrum(data).eigenvalues
    assert lam == pytest.approx([4.0, 2.0, 1.0, 0.25], rel=0.02)


def test_empirical_spectrum_uses_population_normalization():
    data = np.array([[1.0], [-1.0], [3.0], [-3.0]])
    assert empirical_spectrum(data).eigenvalues[0] == pytest.approx(5.0)


def test_empirical_spectrum_clamps_roundoff_to_zero():
    data = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]) * 0.1
    lam = empirical_spectrum(data).eigenvalues
    assert lam[1] == 0.0
    assert lam[0] == pytest.approx(2 * np.var([0.1, 0.2, 0.3]))


def test_empirical_spectrum_errors():
    with pytest.raises(DomainError):
        empirical_spectrum(np.ones((1, 3)))
    with pytest.raises(DomainError):
        empirical_spectrum(np.array([[np.inf, 1.0], [0.0, 1.0]]))


def test_eigensolver_failure_is_numeric_error(monkeypatch):
    def boom(_):
        raise np.linalg.LinAlgError("no convergence")

    monkeypatch.setattr(np.linalg, "eigvalsh", boom)
    with pytest.raises(NumericError):
        empirical_spectrum(np.eye(3))


def test_samples_csv(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1,2\n3,4\n")
    assert load_samples_csv(path).shape == (2, 2)
    path.write_text("1,x\n")
    with pytest.raises(IngestError):
        load_samples_csv(path)


@pytest.mark.parametrize("kind", ["loguniform", "geometric", "powerlaw"])
def test_synthetic_range(kind):
    lam = synthetic_spectrum(kind, 50, 1e-6, 1e3).eigenvalues
    assert lam.size == 50
    assert lam.min() >= 1e-6 * (1 - 1e-12) and lam.max() <= 1e3 * (1 + 1e-12)
    assert np.all(np.diff(lam) <= 0)


def test_synthetic_endpoints_and_single():
    assert synthetic_spectrum("geometric", 4, 1e-3, 1.0).eigenvalues == pytest.approx([1, 0.1, 0.01, 0.001])
    lam = synthetic_spectrum("powerlaw", 100, 1e-6, 1e3).eigenvalues
    assert lam[0] == 1e3 and lam[-1] == 1e-6
    assert list(synthetic_spectrum("single", 3, 0.0, 2.0).eigenvalues) == [2.0, 2.0, 2.0]
    with pytest.raises(DomainError):
        synthetic_spectrum("bogus", 3, 1.0, 2.0)


def test_forward_eigen_limits():
    s = NoiseSchedule()
    assert forward_eigen(5.0, s, 0.0) == 5.0
    assert forward_eigen(1.0, s, 0.7) == pytest.approx(1.0)
    assert forward_eigen(0.0, s, 1.0) == pytest.approx(1 - np.exp(-2 * s.B(1.0)))


def test_forward_spectrum_keeps_order():
    spec = CovarianceSpectrum([0.1, 10.0])
    out = forward_spectrum(spec, NoiseSchedule(), 0.5)
    assert out.eigenvalues[0] < out.eigenvalues[1]


@settings(max_examples=50)
@given(arrays(float, st.integers(1, 6), elements=st.floats(0, 100)), st.floats(0, 1), st.floats(0, 1))
def test_forward_eigen_moves_monotonically_towards_one(lam, a, b):
    s = NoiseSchedule()
    t1, t2 = sorted((a, b))
    d1 = np.abs(forward_eigen(lam, s, t1) - 1)
    d2 = np.abs(forward_eigen(lam, s, t2) - 1)
    assert np.all(d2 <= d1 + 1e-12)
