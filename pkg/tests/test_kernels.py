"""Unit tests for the radial profile zoo."""

import math

import numpy as np
import pytest

from qrbf import kernels


def test_gaussian_values():
    k = kernels.gaussian(sigma=1.0)
    assert k.eval(0.0) == 1.0
    assert np.isclose(k.eval(1.0), math.exp(-0.5))
    r = np.array([0.0, 0.5, 1.0, 2.0])
    vals = k.eval(r)
    assert np.allclose(vals, np.exp(-r * r / 2.0))


def test_gaussian_sigma_eta_equivalence():
    """sigma = sqrt(1/(2 eta^2)) so both parameterizations are the same kernel."""
    eta = 0.7
    sigma = math.sqrt(1.0 / (2.0 * eta * eta))
    a = kernels.gaussian(eta=eta)
    b = kernels.gaussian(sigma=sigma)
    r = np.linspace(0.0, 3.0, 17)
    assert np.array_equal(a.eval(r), b.eval(r))
    with pytest.raises(ValueError):
        kernels.gaussian()
    with pytest.raises(ValueError):
        kernels.gaussian(sigma=1.0, eta=1.0)


def test_gaussian_width_halving_identity():
    # phi_sigma(r)^2 = phi_{sigma/sqrt(2)}(r)
    k1 = kernels.gaussian(sigma=0.8)
    k2 = kernels.gaussian(sigma=0.8 / math.sqrt(2.0))
    r = np.linspace(0.0, 2.0, 9)
    assert np.allclose(k1.eval(r) ** 2, k2.eval(r), rtol=1e-14)


def test_global_profiles_at_zero():
    assert kernels.gaussian(sigma=1.0).phi0 == 1.0
    assert kernels.multiquadric(1.0).phi0 == 1.0
    assert kernels.inverse_multiquadric(1.0).phi0 == 1.0
    assert kernels.matern_c0(1.0).phi0 == 1.0
    assert kernels.matern_c2(1.0).phi0 == 1.0
    # the C^4 profile is not normalized at the origin
    assert kernels.matern_c4(1.0).phi0 == 3.0


def test_matern_c4_value():
    """exp(-w)(3 + 3w + w^2) at w = eta r."""
    k = kernels.matern_c4(2.0)
    r = 0.75
    w = 2.0 * r
    assert np.isclose(k.eval(r), math.exp(-w) * (3.0 + 3.0 * w + w * w), rtol=1e-15)


def test_multiquadric_grows_and_is_not_pd():
    k = kernels.multiquadric(1.5)
    r = np.array([0.0, 1.0, 2.0])
    assert np.allclose(k.eval(r), np.sqrt(1.0 + (1.5 * r) ** 2))
    assert not k.positive_definite
    assert kernels.inverse_multiquadric(1.5).positive_definite


def test_wendland_d3_k2_reference_value():
    # (1 - r)^4 (4 r + 1) at r = 0.5 is 0.0625 * 3 = 0.1875
    k = kernels.wendland(3, 2, alpha=1.0)
    assert k.eval(0.5) == 0.1875
    # support scaling: same profile value at r = alpha/2
    k6 = kernels.wendland(3, 2, alpha=0.6)
    assert np.isclose(k6.eval(0.3), 0.1875, rtol=1e-15)


def test_wendland_all_pairs_basic_shape():
    """Every tabulated profile is positive at 0, zero at the boundary, decreasing."""
    grid = np.linspace(0.0, 1.0, 201)
    for (d, k) in kernels.WENDLAND_PAIRS:
        kern = kernels.wendland(d, k, alpha=1.0)
        vals = kern.eval(grid)
        assert vals[0] == kern.phi0 > 0.0
        assert vals[-1] == 0.0
        assert np.all(np.diff(vals) <= 0.0), f"wendland({d},{k}) not decreasing"


def test_wendland_exact_zero_outside_support():
    k = kernels.wendland(3, 4, alpha=0.4)
    r = np.array([0.4, 0.41, 1.0, 25.0])
    vals = k.eval(r)
    assert np.all(vals == 0.0)
    assert k.eval(0.39) > 0.0


def test_wendland_unknown_pair_rejected():
    with pytest.raises(ValueError):
        kernels.wendland(2, 2, alpha=1.0)
    with pytest.raises(ValueError):
        kernels.wendland(3, 3, alpha=1.0)


def test_scalar_and_array_eval_bit_identical():
    """Scalar calls reuse the array code path, so results match exactly."""
    profiles = [
        kernels.gaussian(sigma=0.9),
        kernels.multiquadric(1.1),
        kernels.inverse_multiquadric(0.4),
        kernels.matern_c0(1.3),
        kernels.matern_c2(0.6),
        kernels.matern_c4(2.2),
    ] + [kernels.wendland(d, k, alpha=0.7) for (d, k) in kernels.WENDLAND_PAIRS]
    rng = np.random.default_rng(11)
    rs = rng.uniform(0.0, 1.5, size=40)
    for kern in profiles:
        batched = kern.eval(rs)
        for r, want in zip(rs, batched):
            got = kern.eval(float(r))
            assert isinstance(got, float)
            assert got == want, f"{kern.family}: scalar {got!r} != array {want!r}"


def test_negative_radius_rejected():
    k = kernels.gaussian(sigma=1.0)
    with pytest.raises(ValueError):
        k.eval(-0.1)
    with pytest.raises(ValueError):
        k.eval(np.array([0.0, -1e-9]))


def test_cutoff():
    w = np.array([-2.0, -1e-300, 0.0, 0.5])
    out = kernels.cutoff(w)
    assert np.array_equal(out, [0.0, 0.0, 0.0, 0.5])


def test_compactness_flags():
    assert kernels.wendland(1, 0, alpha=2.0).is_compact
    assert not kernels.gaussian(sigma=1.0).is_compact
    assert kernels.wendland(1, 0, alpha=2.0).alpha == 2.0


def test_invalid_parameters():
    with pytest.raises(ValueError):
        kernels.gaussian(sigma=0.0)
    with pytest.raises(ValueError):
        kernels.gaussian(eta=-1.0)
    with pytest.raises(ValueError):
        kernels.wendland(3, 2, alpha=0.0)
    with pytest.raises(ValueError):
        kernels.matern_c2(0.0)


def test_from_config_round_trips():
    k = kernels.from_config({"family": "gaussian", "sigma": 0.5})
    assert k.family == "gaussian" and k.sigma == 0.5
    k = kernels.from_config({"family": "gaussian", "eta": 2.0})
    assert np.isclose(k.sigma, math.sqrt(1.0 / 8.0))
    k = kernels.from_config({"family": "wendland", "d": 3, "k": 6, "alpha": 0.9})
    assert (k.d, k.k, k.alpha) == (3, 6, 0.9)
    k = kernels.from_config({"family": "matern-c4", "eta": 1.5})
    assert k.phi0 == 3.0
    with pytest.raises(ValueError):
        kernels.from_config({"sigma": 0.5})
    with pytest.raises(ValueError):
        kernels.from_config({"family": "nope", "eta": 1.0})
    with pytest.raises(ValueError):
        kernels.from_config({"family": "wendland", "d": 3, "k": 2})
