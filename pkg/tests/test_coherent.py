"""Tests for truncated coherent encodings and the Gram matrix they induce."""

import math

import numpy as np
import pytest

from qrbf import coherent
from qrbf.interpolation import DataSet, assemble
from qrbf.kernels import gaussian


def test_amplitude_profile_small_case():
    """ratio 1, four levels: unnormalized weights 1, 1, 1/sqrt(2), 1/sqrt(6)."""
    st = coherent.coherent_state(1.0, 1.0, 4)
    raw = np.array([1.0, 1.0, 1.0 / math.sqrt(2.0), 1.0 / math.sqrt(6.0)])
    assert np.allclose(st.amplitudes, raw / np.linalg.norm(raw), rtol=1e-14)
    assert np.isclose(st.partial_norm, 1.0 + 1.0 + 0.5 + 1.0 / 6.0, rtol=1e-14)
    assert np.isclose(st.exact_norm, math.e, rtol=1e-14)
    assert np.isclose(np.linalg.norm(st.amplitudes), 1.0, rtol=1e-14)


def test_truncations_share_prefixes():
    """Log-space evaluation keeps short and long truncations consistent."""
    for ratio in (0.0, 0.3, 1.0, 2.7):
        short = coherent.coherent_state(ratio, 1.0, 6)
        long = coherent.coherent_state(ratio, 1.0, 12)
        raw_s = short.amplitudes * math.sqrt(short.partial_norm)
        raw_l = long.amplitudes * math.sqrt(long.partial_norm)
        assert np.allclose(raw_s, raw_l[:6], rtol=5e-15, atol=0.0)


def test_negative_displacement_alternates_sign():
    st = coherent.coherent_state(-1.0, 1.0, 5)
    signs = np.sign(st.amplitudes)
    assert np.array_equal(signs, [1.0, -1.0, 1.0, -1.0, 1.0])


def test_sigma_only_enters_through_the_ratio():
    a = coherent.coherent_state(0.8, 2.0, 7)
    b = coherent.coherent_state(0.4, 1.0, 7)
    assert np.array_equal(a.amplitudes, b.amplitudes)


def test_truncation_bound_formula_and_monotonicity():
    # delta = sqrt(2 ratio^(2N) / N!)
    want = math.sqrt(2.0 * 1.0 / math.factorial(10))
    assert np.isclose(coherent.truncation_bound(1.0, 1.0, 10), want, rtol=1e-12)
    bounds = [coherent.truncation_bound(0.9, 1.0, n) for n in range(2, 25)]
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
    assert coherent.truncation_bound(0.0, 1.0, 5) == 0.0


def test_min_order_reference_point():
    # smallest N with sqrt(2/N!) <= 7.5e-4 at ratio 1 is N = 10
    assert coherent.min_order(1.0, 7.5e-4) == 10
    n = coherent.min_order(2.0, 1e-6)
    assert coherent.truncation_bound(2.0, 1.0, n) <= 1e-6
    assert coherent.truncation_bound(2.0, 1.0, n - 1) > 1e-6


def test_truncation_bound_dominates_measured_tail():
    """The bound must sit above the actual L2 distance to the full state."""
    ref_order = 220
    for ratio in (0.25, 0.75, 1.5):
        ref = coherent.coherent_state(ratio, 1.0, ref_order).amplitudes
        for order in range(2, 20):
            st = coherent.coherent_state(ratio, 1.0, order).amplitudes
            padded = np.zeros(ref_order)
            padded[:order] = st
            measured = np.linalg.norm(padded - ref)
            assert measured <= coherent.truncation_bound(ratio, 1.0, order) + 1e-15


def test_product_state_kron_structure():
    x = np.array([0.5, -0.3, 0.1])
    order = 5
    ps = coherent.product_state(x, 1.0, order)
    assert ps.d == 3 and ps.dim == order**3
    amps = ps.amplitudes()
    manual = np.array([1.0])
    for xi in x:
        manual = np.kron(manual, coherent.coherent_state(xi, 1.0, order).amplitudes)
    assert np.array_equal(amps, manual)
    assert np.isclose(np.linalg.norm(amps), 1.0, rtol=1e-12)


def test_coherent_inner_converges_to_gaussian_overlap():
    """<psi_x|psi_z> -> exp(-||x-z||^2 / (2 sigma^2)) as the cutoff grows."""
    x = np.array([0.5, -0.3])
    z = np.array([0.1, 0.2])
    sigma = 1.0
    want = math.exp(-np.sum((x - z) ** 2) / (2.0 * sigma**2))
    got = coherent.coherent_inner(x, z, sigma, 60)
    assert np.isclose(got, want, rtol=1e-13)


def test_gram_coherent_matches_exact_matrix():
    rng = np.random.default_rng(2)
    sites = rng.uniform(-1.0, 1.0, size=(6, 2))
    ds = DataSet(sites, rng.standard_normal(6))
    sigma = 0.8
    approx = coherent.gram_coherent(ds, sigma, 40)
    exact = assemble(ds, gaussian(sigma=sigma), normalized=True)
    assert approx.normalized and approx.family == "gaussian"
    assert np.allclose(approx.data, exact.data, atol=1e-13)
    G = approx.data
    assert np.array_equal(G, G.T)
    assert np.allclose(np.diag(G), 1.0 / ds.m, rtol=1e-15)


def test_gram_report_bounds_hold():
    rng = np.random.default_rng(4)
    for trial in range(5):
        r = np.random.default_rng(50 + trial)
        m, d = int(r.integers(3, 8)), int(r.integers(1, 4))
        ds = DataSet(r.uniform(-1, 1, size=(m, d)), r.standard_normal(m))
        rep = coherent.gram_report(ds, sigma=0.7, order=int(r.integers(5, 12)))
        assert rep.entry_max_error <= rep.entry_bound
        assert rep.frobenius_error <= rep.frobenius_bound
        assert rep.entry_bound == 2.0 * d * rep.delta / m
        assert rep.frobenius_bound == 2.0 * d * rep.delta


def test_superposition_reduction_reproduces_gram():
    """Tracing the index register of the global state gives the Gram matrix."""
    rng = np.random.default_rng(9)
    ds = DataSet(rng.uniform(-0.8, 0.8, size=(4, 2)), rng.standard_normal(4))
    reduced, dev, trace = coherent.superposition_gram_check(ds, sigma=0.9, order=5)
    direct = coherent.gram_coherent(ds, 0.9, 5).data
    assert dev <= 1e-12
    assert np.allclose(reduced, direct, atol=1e-12)
    assert np.isclose(trace, 1.0, atol=1e-12)


def test_superposition_check_refuses_huge_registers():
    ds = DataSet(np.linspace(0, 1, 5)[:, None] * np.ones((1, 3)), np.ones(5))
    with pytest.raises(ValueError):
        coherent.superposition_gram_check(ds, sigma=1.0, order=30)  # 27000 > cap


def test_displacement_operator_cross_check():
    """Truncated amplitudes agree with expm of the displacement generator."""
    order = 30
    for r in (0.3, 1.0, 1.7):
        direct = coherent.coherent_state(r, 1.0, order).amplitudes
        matrix = coherent.displacement_state(r, 1.0, order)
        assert np.max(np.abs(direct - matrix)) <= 1e-8


def test_ratio_overflow_guard():
    with pytest.raises(OverflowError):
        coherent.coherent_state(30.0, 1.0, 10)
