import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from conftest import ALL_MODELS, within_3se, within_max
from lamperti_ou.errors import Unavailable
from lamperti_ou.experiments import NuTest
from lamperti_ou.models import JumpLaw, LevyModel
from lamperti_ou.oracles import (
    INFINITE,
    Normalizers,
    NuFunctional,
    mean_inverse_hat_I,
    ml_moment,
    ml_sample,
    moment_oracle,
    nu_integral,
)
from lamperti_ou.replicates import default_threads, hat_I_draws, log_hat_I_draws
from lamperti_ou.rng import stream

SUBORDINATORS = [m for m in ALL_MODELS if m.is_subordinator]


def _nu(model, seed=0):
    return NuFunctional(lambda n, rng: log_hat_I_draws(model, n, seed, offset=int(rng.integers(1 << 30))))


def test_moment_oracle_examples(poisson1):
    for b in (0.5, 2.0):
        m = LevyModel.deterministic_drift(b)
        assert_allclose([moment_oracle(m, n) for n in range(1, 6)], [b**-n for n in range(1, 6)], rtol=1e-14)
    assert_allclose(moment_oracle(poisson1, 1), 1.581977, atol=1e-6)
    assert_allclose(moment_oracle(poisson1, 2), 3.65917, atol=1e-5)
    e1, e2 = 1 - math.exp(-1), 1 - math.exp(-2)
    assert_allclose(moment_oracle(poisson1, 2), 2 / (e1 * e2), rtol=1e-14)


def test_moment_oracle_recursion(poisson1):
    for n in range(2, 21):
        from lamperti_ou.models import laplace_exponent

        prev = moment_oracle(poisson1, n - 1)
        assert_allclose(moment_oracle(poisson1, n), n * prev / laplace_exponent(poisson1, n), rtol=1e-13)


def test_moment_oracle_errors(brownian, poisson1):
    with pytest.raises(Unavailable):
        moment_oracle(brownian, 1)
    with pytest.raises(ValueError):
        moment_oracle(poisson1, 21)
    with pytest.raises(ValueError):
        moment_oracle(poisson1, 0)


@pytest.mark.slow
@pytest.mark.parametrize("model", [m for m in SUBORDINATORS if not m.is_pure_drift], ids=str)
def test_moment_oracle_against_monte_carlo(model):
    # grid sums carry an O(step) bias (about step * phi(1) / 2 in the mean), so grid
    # models use a finer step than the default here
    step = None if model.finite_activity else 0.005
    h = hat_I_draws(model, 100_000, 7, step=step, threads=default_threads())
    for n in (1, 2):
        assert within_max(h**n, moment_oracle(model, n))


def test_mean_inverse_examples():
    assert mean_inverse_hat_I(LevyModel.compound_poisson(1.0, JumpLaw.constant(1.0))) == 1.0
    assert mean_inverse_hat_I(LevyModel.brownian(1.0, 0.7)) == 0.7
    assert mean_inverse_hat_I(LevyModel.stable_subordinator(0.5)) is INFINITE
    assert mean_inverse_hat_I(LevyModel.compound_poisson(1.0, JumpLaw.pareto(0.5))) == math.inf


@pytest.mark.parametrize("model", ALL_MODELS, ids=str)
def test_nu_inv_is_one(model):
    est, se = nu_integral(_nu(model), NuTest("inv"), 5000, stream(1))
    assert abs(est - 1.0) <= max(3 * se, 1e-12)


def test_nu_total_mass_is_mean(poisson1):
    one = lambda x: np.ones_like(x)  # noqa: E731
    est, se = nu_integral(_nu(poisson1), one, 50_000, stream(2))
    assert abs(est - 1.0) <= 3 * se


def test_nu_zero(poisson1):
    est, se = nu_integral(_nu(poisson1), lambda x: np.zeros_like(x), 100, stream(3))
    assert est == 0.0 and se == 0.0


def test_nu_log_weights_match_linear(poisson1):
    lh = log_hat_I_draws(poisson1, 1000, 4)
    for f in (NuTest("inv"), NuTest("exp_inv"), NuTest("window_inv", 0.3, 0.9)):
        plain = np.exp(-lh) * f(np.exp(-lh))
        assert_allclose(NuFunctional.weights(lh, f), plain, rtol=1e-12)


def test_nu_log_weights_survive_underflow():
    lh = np.array([-800.0, -1.0])
    assert_allclose(NuFunctional.weights(lh, NuTest("inv")), [1.0, 1.0], rtol=1e-12)
    assert_allclose(NuFunctional.weights(lh, NuTest("exp_inv")), [1.0, math.exp(-1 / math.e)], rtol=1e-12)


def test_ml_moment_examples():
    assert_allclose(ml_moment(0.5, 1), 2 / math.sqrt(math.pi), rtol=1e-14)
    assert_allclose(ml_moment(0.5, 1), 1.128379, atol=1e-6)
    assert_allclose(ml_moment(0.5, 2), 2.0, rtol=1e-14)
    assert ml_moment(0.3, 0) == 1.0
    with pytest.raises(ValueError):
        ml_moment(1.0, 1)
    with pytest.raises(ValueError):
        ml_moment(0.5, 11)


def test_ml_moment_against_mpmath():
    import mpmath

    for a in (0.05, 0.3, 0.5, 0.7, 0.95):
        for n in range(11):
            exact = mpmath.factorial(n) / mpmath.gamma(1 + n * mpmath.mpf(a))
            assert_allclose(ml_moment(a, n), float(exact), rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_ml_sample_moments(alpha):
    x = ml_sample(alpha, stream(5, int(10 * alpha)), 100_000)
    assert np.all(x > 0)
    assert within_3se(x, ml_moment(alpha, 1))
    assert within_3se(x**2, ml_moment(alpha, 2))


def test_ml_sample_scalar():
    assert isinstance(ml_sample(0.5, stream(0)), float)


def test_normalizers():
    n = Normalizers(0.5)
    assert_allclose(n.a(100.0), 10.0)
    assert_allclose(n.b(10.0), 100.0)
    c = Normalizers(0.4, scale=3.0)
    assert_allclose(c.a(2.0), 2.0**0.4 / 3.0)
    assert_allclose(c.b(2.0), 6.0 ** (1 / 0.4))


@given(alpha=st.floats(0.05, 0.95), t=st.floats(1e-3, 1e3), c=st.floats(0.1, 10.0))
def test_normalizers_inverse(alpha, t, c):
    n = Normalizers(alpha, c)
    assert_allclose(n.a(n.b(t)), t, rtol=1e-9)
    assert_allclose(n.b(n.a(t)), t, rtol=1e-9)


def test_normalizer_scaling_of_stable_increments():
    # xi_t / b(t) is standard positive stable for scale c
    from lamperti_ou.models import sample_increments, sample_positive_stable
    from lamperti_ou.stats import KS_ALPHA, ks_two_sample

    m = LevyModel.stable_subordinator(0.6, scale=2.5)
    n = Normalizers(0.6, 2.5)
    x = sample_increments(m, 7.0, stream(8), 20_000) / n.b(7.0)
    assert ks_two_sample(x, sample_positive_stable(0.6, stream(9), 20_000))[1] > KS_ALPHA
