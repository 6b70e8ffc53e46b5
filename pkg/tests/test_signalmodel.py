import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pronynd import (
    ExponentialSumModel,
    IndexSet,
    InsufficientWindowError,
    LatticeSignal,
    Polynomial,
    box,
    convolve,
    correlate,
    evaluate_model,
    match_models,
    models_match,
    random_model,
    sample,
    shift_hull,
    sis_dimension,
    simplex,
)

from conftest import LN2, e1_value, e2_value, e3_value, random_signal


def test_evaluate_model_examples(e1):
    assert evaluate_model(e1, (2,)) == pytest.approx(13.0)
    assert evaluate_model(ExponentialSumModel(1, []), (5,)) == 0
    m = ExponentialSumModel(1, [([LN2], Polynomial.monomial((1,)))])
    assert evaluate_model(m, (3,)) == pytest.approx(24.0)


def test_sample_examples(e1, e3):
    W = box([0], [4])
    assert np.allclose(sample(e1, W).values, [e1_value(a) for a in range(5)], atol=1e-12)
    assert np.allclose(sample(e1, W).values, [2, 5, 13, 35, 97])
    assert np.allclose(sample(e3, W).values, [0, 2, 8, 24, 64])
    assert np.allclose(sample(e3, W).values, [e3_value(a) for a in range(5)])
    assert len(sample(e1, IndexSet((), s=1))) == 0


def test_sample_e2(e2_signal):
    for a in e2_signal.window:
        assert e2_signal(a) == pytest.approx(e2_value(*a))


def test_correlate_examples(e1_signal):
    one = Polynomial.constant(1.0, 1)
    E = box([0], [2])
    assert correlate(e1_signal, one, E).allclose(e1_signal.restrict(E))
    z = Polynomial.variable(0, 1)
    r = correlate(e1_signal, z ** 2 - 5 * z + 6, E)
    assert np.allclose(r.values, 0, atol=1e-11)
    assert correlate(e1_signal, z - 2, box([0], [0])).values[0] == pytest.approx(1.0)


def test_correlate_reports_missing(e1_signal):
    z = Polynomial.variable(0, 1)
    with pytest.raises(InsufficientWindowError) as exc:
        correlate(e1_signal, z, box([0], [4]))
    assert exc.value.missing == [(5,)]


def test_convolve_examples(e1):
    f = sample(e1, box([-1], [2]))
    z = Polynomial.variable(0, 1)
    assert convolve(f, z, box([0], [0])).values[0] == pytest.approx(5 / 6)
    one = Polynomial.constant(1.0, 1)
    assert convolve(f, one, box([0], [1])).allclose(f.restrict(box([0], [1])))
    g = 2 * z - 1
    E = box([0], [1])
    assert convolve(f, g, E).allclose(correlate(f, g.reflect(), E))


def test_sis_dimension_examples(e1, e3):
    assert sis_dimension(e1) == 2
    assert sis_dimension(e3) == 2
    z1z2 = Polynomial.monomial((1, 1))
    m = ExponentialSumModel(2, [([0.1, 0.2], z1z2)])
    assert sis_dimension(m) == 4
    assert len(shift_hull(z1z2)) == 4


def test_model_json_roundtrip():
    m = random_model(2, 3, degree=1, seed=3)
    m2 = ExponentialSumModel.from_json(m.to_json())
    assert models_match(m, m2, 0, 0)


def test_model_rejects_duplicates():
    with pytest.raises(ValueError):
        ExponentialSumModel(1, [([0.1], 1.0), ([0.1], 2.0)])
    # zero coefficients are dropped
    assert len(ExponentialSumModel(1, [([0.1], 0.0)])) == 0


def test_signal_csv_roundtrip(e2_signal):
    back = LatticeSignal.from_csv(e2_signal.to_csv())
    assert back.window.as_set() == e2_signal.window.as_set()
    assert back.allclose(e2_signal, atol=0)


def test_random_model_properties():
    m = random_model(3, 5, seed=11)
    assert len(m) == 5
    for omega, coeff in m.terms:
        assert np.all(np.abs(omega.real) <= 0.5)
        assert np.all((omega.imag > -np.pi) & (omega.imag <= np.pi))
        assert abs(abs(coeff.coeff((0, 0, 0))) - 1) < 1e-12
    with pytest.raises(ValueError):
        random_model(1, 0)


def test_match_models_counts():
    a, b = random_model(1, 2, seed=1), random_model(1, 3, seed=1)
    assert match_models(a, b)[1] == float("inf")


# -- properties ----------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(
    st.integers(0, 10_000),
    st.integers(1, 2),
    st.tuples(st.integers(0, 2), st.integers(0, 2)),
)
def test_duality(seed, s, alpha):
    rng = np.random.default_rng(seed)
    alpha = alpha[:s]
    if sum(alpha) > 2:
        alpha = (0,) * s
    f = random_signal(rng, simplex(6, s))
    g = Polynomial.from_vector(simplex(2, s), rng.normal(size=len(simplex(2, s))) + 0j)
    E = simplex(2, s)
    lhs = correlate(f.shift(alpha), g, E)
    rhs = correlate(f, g.times_monomial(alpha), E)
    assert np.allclose(lhs.values, rhs.values, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_correlation_is_bilinear(seed, a, b):
    rng = np.random.default_rng(seed)
    W = simplex(5, 2)
    f1, f2 = random_signal(rng, W), random_signal(rng, W)
    G = simplex(2, 2)
    g1 = Polynomial.from_vector(G, rng.normal(size=len(G)) + 0j, rtol=0)
    g2 = Polynomial.from_vector(G, rng.normal(size=len(G)) + 0j, rtol=0)
    E = simplex(2, 2)
    lhs = correlate(a * f1 + b * f2, g1, E).values
    rhs = a * correlate(f1, g1, E).values + b * correlate(f2, g1, E).values
    assert np.allclose(lhs, rhs, atol=1e-9)
    lhs = correlate(f1, g1 * a + g2 * b, E).values
    rhs = a * correlate(f1, g1, E).values + b * correlate(f1, g2, E).values
    assert np.allclose(lhs, rhs, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_sample_agrees_with_evaluate(seed, s):
    m = random_model(s, 3, degree=1, seed=seed)
    W = simplex(3, s)
    f = sample(m, W)
    for a in W:
        assert f(a) == evaluate_model(m, a)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 2), st.integers(-2, 2))
def test_frequency_period_invariance(seed, j, k):
    m = random_model(3, 2, degree=1, seed=seed)
    omega, coeff = m.terms[0]
    moved = omega.copy()
    moved[j] += 2j * np.pi * k
    m2 = ExponentialSumModel(3, [(moved, coeff)] + m.terms[1:])
    for a in simplex(3, 3):
        assert evaluate_model(m2, a) == pytest.approx(evaluate_model(m, a), abs=1e-10)
