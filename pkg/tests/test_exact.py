import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gdiff import EXACT_PT, STANDARD_NORMAL, CovarianceSpectrum, DomainError, InitLaw, NoiseSchedule
from gdiff.exact import (generative_marginals, ode_gain, ode_marginal_eigen, sde_gain, sde_marginal_eigen,
                         sde_noise_eigen)
from gdiff.spectrum import forward_eigen

CONST = NoiseSchedule.constant(1.0, 1.0)
LINEAR = NoiseSchedule()

# Frozen from numerically integrating the backward variance ODEs
# dv/dt = 2 beta (1 - 2/lam_tau) v + 2 beta  and  dv/dt = 2 beta (1 - 1/lam_tau) v
# (scipy solve_ivp, DOP853, rtol 1e-12) from v = 1 at forward time T.
ORACLE = [
    (CONST, 2.0, 0.0, 1.9431626535250992, 1.7615941559554233),
    (LINEAR, 0.5, 0.3, 0.8018334000509505, 0.8018507128000724),
    (LINEAR, 3.0, 0.3, 1.7926663756075047, 1.792511583936387),
]


@pytest.mark.parametrize("sched, lam, s, sde, ode", ORACLE)
def test_marginals_match_integrated_variance_odes(sched, lam, s, sde, ode):
    assert sde_marginal_eigen(lam, 1.0, s, sched) == pytest.approx(sde, rel=1e-9)
    assert ode_marginal_eigen(lam, 1.0, s, sched) == pytest.approx(ode, rel=1e-9)


def test_exact_initialization_reproduces_forward_marginal():
    lam = np.array([0.0, 1e-4, 0.5, 1.0, 30.0])
    for s in (0.0, 0.2, 0.9, 1.0):
        ref = forward_eigen(lam, LINEAR, s)
        c0 = forward_eigen(lam, LINEAR, LINEAR.T)
        assert sde_marginal_eigen(lam, c0, s, LINEAR) == pytest.approx(ref, rel=1e-12, abs=1e-15)
        assert ode_marginal_eigen(lam, c0, s, LINEAR) == pytest.approx(ref, rel=1e-12, abs=1e-15)


def test_at_start_time_the_law_is_the_initialization():
    lam = np.array([0.1, 2.0])
    assert sde_marginal_eigen(lam, 1.0, 1.0, LINEAR) == pytest.approx([1.0, 1.0])
    assert ode_marginal_eigen(lam, 1.0, 1.0, LINEAR) == pytest.approx([1.0, 1.0])


def test_gain_and_noise_decompose_the_sde_marginal():
    lam, c0, s = 2.5, 0.7, 0.35
    total = sde_gain(lam, s, LINEAR) ** 2 * c0 + sde_noise_eigen(lam, s, LINEAR)
    assert total == pytest.approx(sde_marginal_eigen(lam, c0, s, LINEAR), rel=1e-13)
    assert ode_gain(lam, s, LINEAR) ** 2 * c0 == pytest.approx(ode_marginal_eigen(lam, c0, s, LINEAR))


def test_generative_marginals_spectra():
    spec = CovarianceSpectrum([2.0, 0.5])
    sde, ode = generative_marginals(spec, CONST, 0.0)
    assert sde.eigenvalues[0] == pytest.approx(1.9431626535250992)
    assert ode.eigenvalues[0] == pytest.approx(1.7615941559554233)
    sde, ode = generative_marginals(spec, CONST, 0.0, init=EXACT_PT)
    assert sde.eigenvalues == pytest.approx([2.0, 0.5])
    assert ode.eigenvalues == pytest.approx([2.0, 0.5])


def test_init_law_variants():
    assert InitLaw("N0") == STANDARD_NORMAL
    assert InitLaw("pT") == EXACT_PT
    assert STANDARD_NORMAL.short == "N0" and EXACT_PT.short == "pT"
    assert InitLaw("custom", 0.3).variance(np.array([5.0]), LINEAR) == pytest.approx([0.3])
    with pytest.raises(DomainError):
        InitLaw("uniform")
    with pytest.raises(DomainError):
        InitLaw("custom")


def test_time_outside_horizon():
    with pytest.raises(DomainError):
        sde_marginal_eigen(1.0, 1.0, 1.5, LINEAR)


@settings(max_examples=300)
@given(st.floats(1e-6, 100.0), st.floats(0.0, 1.0), st.sampled_from([CONST, LINEAR]))
def test_sde_is_never_further_than_ode(lam, frac, sched):
    s = frac * sched.T
    ref = math.sqrt(forward_eigen(lam, sched, s))
    sde = math.sqrt(max(sde_marginal_eigen(lam, 1.0, s, sched), 0.0))
    ode = math.sqrt(ode_marginal_eigen(lam, 1.0, s, sched))
    assert abs(ref - sde) <= abs(ref - ode) + 1e-12


@settings(max_examples=100)
@given(st.floats(1e-6, 100.0), st.floats(0.0, 5.0), st.floats(0.0, 1.0))
def test_sde_noise_variance_is_non_negative(lam, c0, s):
    assert sde_noise_eigen(lam, s, LINEAR) >= -1e-12
    assert sde_marginal_eigen(lam, c0, s, LINEAR) >= -1e-12
