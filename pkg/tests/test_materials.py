"""Property models, the conductivity transform, and the coupling integral."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

import tegsolve as tg
from tegsolve.errors import (
    DomainError,
    InvalidMaterial,
    NonPositiveValue,
    RangeError,
)

from helpers import make_model, random_spec


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def test_eval_constant():
    assert tg.eval_property(tg.constant(1.0), 300.0) == 1.0


def test_eval_clamped_linear_worked_values():
    m = tg.clamped_linear(M=48.0, T_pivot=2.0, v_pivot=2.0)
    assert tg.eval_property(m, 1.5) == 2.0
    assert tg.eval_property(m, 2.5) == pytest.approx(26.0, abs=0)


def test_eval_reciprocal():
    assert tg.eval_property(tg.reciprocal(1.0), 2.0) == 0.5


def test_eval_below_domain_raises():
    m = tg.log_affine(c0=1.0, c1=1.0, T_ref=1.0)  # positive only above e^-1
    with pytest.raises(DomainError):
        tg.eval_property(m, 0.2)


def test_eval_nonpositive_value_raises():
    m = tg.log_affine(c0=1.0, c1=-1.0, T_ref=1.0)  # goes negative above e
    with pytest.raises(NonPositiveValue):
        tg.eval_property(m, 5.0)


def test_eval_vectorized_matches_scalar():
    m = tg.table([(1.0, 2.0), (2.0, 3.0), (4.0, 1.5)])
    Ts = np.array([0.5, 1.5, 3.0, 5.0])
    vec = tg.eval_property(m, Ts)
    assert vec == pytest.approx([2.0, 2.5, 2.25, 1.5])
    for t, v in zip(Ts, vec):
        assert tg.eval_property(m, float(t)) == pytest.approx(v)


def test_invalid_materials_rejected():
    with pytest.raises(InvalidMaterial):
        tg.constant(0.0)
    with pytest.raises(InvalidMaterial):
        tg.reciprocal(-1.0)
    with pytest.raises(InvalidMaterial):
        tg.clamped_linear(M=1.0, T_pivot=1.0, v_pivot=0.0)
    with pytest.raises(InvalidMaterial):
        tg.table([(1.0, 1.0)])
    with pytest.raises(InvalidMaterial):
        tg.table([(1.0, 1.0), (1.0, 2.0)])
    with pytest.raises(InvalidMaterial):
        tg.table([(1.0, 1.0), (2.0, -1.0)])
    with pytest.raises(InvalidMaterial):
        tg.linear(a=-1.0, b=-1.0)


def test_clamped_linear_nondecreasing_and_lipschitz():
    m = tg.clamped_linear(M=48.0, T_pivot=2.0, v_pivot=2.0)
    Ts = np.linspace(0.5, 4.0, 400)
    vals = np.asarray(m.value(Ts))
    assert np.all(np.diff(vals) >= 0)
    lip = np.max(np.abs(np.diff(vals) / np.diff(Ts)))
    assert lip <= 48.0 + 1e-9


def test_wiedemann_franz_binding():
    pair = tg.MaterialPair(kappa=tg.wiedemann_franz(2.4e-8),
                           rho=tg.constant(1e-5), alpha0=2e-4)
    assert pair.kappa.value(300.0) == pytest.approx(2.4e-8 * 300.0 / 1e-5)
    with pytest.raises(InvalidMaterial):
        tg.MaterialPair(kappa=tg.wiedemann_franz(1.0),
                        rho=tg.wiedemann_franz(1.0), alpha0=1.0)
    with pytest.raises(InvalidMaterial):
        tg.wiedemann_franz(1.0).value(300.0)


# ---------------------------------------------------------------------------
# the conductivity transform K
# ---------------------------------------------------------------------------

def test_k_forward_worked_values():
    kt = tg.KTransform(kappa=tg.constant(1.0), T_c=1.0)
    assert kt.forward(2.0) == pytest.approx(2.0, abs=1e-14)
    kt = tg.KTransform(kappa=tg.linear(1.0, 0.0), T_c=1.0)  # kappa(T) = T
    assert kt.forward(2.0) == pytest.approx(2.5, abs=1e-14)
    kt = tg.KTransform(kappa=tg.reciprocal(1.0), T_c=1.0)  # kappa(T) = 1/T
    assert kt.forward(math.e) == pytest.approx(2.0, abs=1e-13)


def test_k_forward_below_base_raises():
    kt = tg.KTransform(kappa=tg.constant(1.0), T_c=1.0)
    with pytest.raises(DomainError):
        kt.forward(0.5)


def test_k_forward_strictly_increasing():
    rng = np.random.default_rng(7)
    for fam in ("constant", "linear", "reciprocal", "table", "clamped_linear"):
        m = make_model(rng, fam, 1.0, 3.0)
        kt = tg.KTransform(kappa=m, T_c=1.0)
        Ts = np.sort(rng.uniform(1.0, 6.0, size=30))
        Ks = kt.forward_many(Ts)
        assert np.all(np.diff(Ks) > 0)


def test_k_inverse_worked_values():
    kt = tg.KTransform(kappa=tg.constant(1.0), T_c=1.0)
    assert kt.inverse(2.0) == pytest.approx(2.0, abs=1e-12)
    kt = tg.KTransform(kappa=tg.linear(1.0, 0.0), T_c=1.0)
    assert kt.inverse(2.5) == pytest.approx(2.0, abs=1e-12)


def test_k_inverse_out_of_range():
    kt = tg.KTransform(kappa=tg.constant(1.0), T_c=1.0)
    with pytest.raises(RangeError):
        kt.inverse(0.5)


def test_k_infinity_finite_for_decaying_kappa():
    # kappa = 1 - 0.5*T loses positivity at T = 2: K_infinity = K(2) finite
    kt = tg.KTransform(kappa=tg.linear(-0.5, 1.0), T_c=1.0)
    assert kt.K_infinity == pytest.approx(1.0 + (1.0 * 1.0 - 0.25 * (4 - 1)), abs=1e-12)
    with pytest.raises(RangeError):
        kt.inverse(kt.K_infinity)
    # K(T) < K_infinity for every finite valid T
    for T in (1.0, 1.5, 1.9, 1.99):
        assert kt.forward(T) < kt.K_infinity


def test_k_infinity_infinite_families():
    for m in (tg.constant(2.0), tg.linear(1.0, 0.5),
              tg.clamped_linear(1.0, 2.0, 1.0),
              tg.table([(1.0, 1.0), (2.0, 2.0)])):
        assert math.isinf(tg.KTransform(kappa=m, T_c=1.0).K_infinity)


def test_wiedemann_franz_transform_roundtrip():
    # quadrature-backed K (no closed antiderivative for the bound quotient)
    pair = tg.MaterialPair(
        kappa=tg.wiedemann_franz(2.0),
        rho=tg.table([(1.0, 1.5), (2.0, 2.5), (3.0, 2.0)]),
        alpha0=1.0,
    )
    kt = tg.KTransform(kappa=pair.kappa, T_c=1.0)
    assert math.isinf(kt.K_infinity)
    for T in (1.0, 1.3, 2.0, 2.7, 4.0):
        u = kt.forward(T)
        assert abs(kt.forward(kt.inverse(u)) - u) <= 1e-12 * max(1.0, abs(u))


def test_k_roundtrip_random():
    rng = np.random.default_rng(11)
    for fam in ("constant", "linear", "reciprocal", "log_affine",
                "clamped_linear", "table"):
        m = make_model(rng, fam, 1.0, 3.0)
        kt = tg.KTransform(kappa=m, T_c=1.0)
        for T in rng.uniform(1.0, 6.0, size=100):
            u = kt.forward(T)
            T2 = kt.inverse(u)
            assert abs(kt.forward(T2) - u) <= 1e-12 * max(1.0, abs(u))
            assert T2 == pytest.approx(T, rel=1e-9, abs=1e-9)


# ---------------------------------------------------------------------------
# the coupling integral
# ---------------------------------------------------------------------------

def _quad_product(pair, lo, hi):
    pts = sorted({t for m in (pair.kappa, pair.rho) for t in m.kinks()
                  if lo < t < hi})
    val, _ = quad(lambda T: pair.kappa.value(T) * pair.rho.value(T),
                  lo, hi, epsabs=1e-14, epsrel=1e-12, points=pts or None,
                  limit=200)
    return val


def test_rk_integral_unit():
    pair = tg.MaterialPair(kappa=tg.constant(1.0), rho=tg.constant(1.0),
                           alpha0=1.0)
    assert tg.rho_kappa_integral(pair, 1.0, 2.0) == pytest.approx(1.0, abs=1e-14)


def test_rk_integral_reciprocal_kappa_log_form():
    rho0, k1, T_c, T_h = 0.7, 1.9, 1.0, 2.5
    pair = tg.MaterialPair(kappa=tg.reciprocal(k1), rho=tg.constant(rho0),
                           alpha0=1.0)
    expect = rho0 * k1 * math.log(T_h / T_c)
    assert tg.rho_kappa_integral(pair, T_c, T_h) == pytest.approx(expect, rel=1e-14)


def test_rk_integral_log_affine_times_reciprocal():
    rho0, rho1sq, k1, T_c, T_h = 0.9, 0.36, 1.3, 1.0, 2.0
    T_m = 0.5 * (T_c + T_h)
    pair = tg.MaterialPair(kappa=tg.reciprocal(k1),
                           rho=tg.log_affine(rho0, rho1sq, T_m), alpha0=1.0)
    expect = (rho0 * k1 * (1.0 + 0.5 * rho1sq * math.log(T_h * T_c / T_m ** 2))
              * math.log(T_h / T_c))
    got = tg.rho_kappa_integral(pair, T_c, T_h)
    assert got == pytest.approx(expect, rel=1e-13)
    assert got == pytest.approx(_quad_product(pair, T_c, T_h), rel=1e-10)


def test_rk_integral_wiedemann_franz_exact():
    pair = tg.MaterialPair(kappa=tg.wiedemann_franz(2.0),
                           rho=tg.table([(1.0, 1.0), (2.0, 3.0), (3.0, 2.0)]),
                           alpha0=1.0)
    assert tg.rho_kappa_integral(pair, 1.0, 3.0) == pytest.approx(
        0.5 * 2.0 * (9.0 - 1.0), rel=1e-14)


def test_rk_integral_additive_over_adjacent_intervals():
    rng = np.random.default_rng(23)
    for idx in range(8):
        spec = random_spec(rng, idx)
        pair, T_c, T_h = spec.pair, spec.T_c, spec.T_h
        mid = 0.5 * (T_c + T_h)
        whole = tg.rho_kappa_integral(pair, T_c, T_h)
        parts = (tg.rho_kappa_integral(pair, T_c, mid)
                 + tg.rho_kappa_integral(pair, mid, T_h))
        assert parts == pytest.approx(whole, rel=1e-10, abs=1e-13 * max(1, whole))


def test_rk_integral_closed_forms_match_quadrature():
    rng = np.random.default_rng(31)
    cases = [
        tg.MaterialPair(tg.constant(1.3), tg.linear(0.4, 0.2), 1.0),
        tg.MaterialPair(tg.linear(0.3, 0.5), tg.linear(0.2, 0.9), 1.0),
        tg.MaterialPair(tg.reciprocal(1.7), tg.linear(0.5, 0.1), 1.0),
        tg.MaterialPair(tg.reciprocal(1.7), tg.reciprocal(0.8), 1.0),
        tg.MaterialPair(tg.constant(0.9), tg.clamped_linear(5.0, 1.7, 1.0), 1.0),
        tg.MaterialPair(tg.constant(0.9),
                        tg.table([(0.8, 1.0), (1.5, 2.0), (2.5, 1.2)]), 1.0),
        tg.MaterialPair(tg.reciprocal(1.1), tg.log_affine(0.8, 0.5, 1.0), 1.0),
    ]
    for pair in cases:
        lo = rng.uniform(1.0, 1.3)
        hi = rng.uniform(1.9, 2.6)
        got = tg.rho_kappa_integral(pair, lo, hi)
        ref = _quad_product(pair, lo, hi)
        assert got == pytest.approx(ref, rel=1e-10)


def test_family_antiderivatives_match_quadrature():
    rng = np.random.default_rng(47)
    models = [
        tg.constant(1.7),
        tg.linear(0.6, 0.4),
        tg.reciprocal(2.1),
        tg.log_affine(1.2, 0.7, 1.1),
        tg.clamped_linear(7.0, 1.8, 0.9),
        tg.table([(0.9, 1.1), (1.4, 2.0), (2.2, 0.8), (3.0, 1.3)]),
    ]
    for m in models:
        lo = rng.uniform(1.0, 1.4)
        hi = rng.uniform(1.9, 2.8)
        pts = [t for t in m.kinks() if lo < t < hi]
        ref, _ = quad(m.value, lo, hi, epsabs=1e-14, epsrel=1e-12,
                      points=pts or None, limit=200)
        assert m.integral(lo, hi) == pytest.approx(ref, rel=1e-10)


def test_rk_integral_reversed_bounds_raise():
    pair = tg.MaterialPair(tg.constant(1.0), tg.constant(1.0), 1.0)
    with pytest.raises(DomainError):
        tg.rho_kappa_integral(pair, 2.0, 1.0)


# ---------------------------------------------------------------------------
# JSON schema
# ---------------------------------------------------------------------------

def test_material_json_roundtrip():
    pair = tg.MaterialPair(
        kappa=tg.reciprocal(1.3),
        rho=tg.table([(1.0, 2.0), (2.0, 2.5), (3.0, 1.0)]),
        alpha0=-0.7,
    )
    d = pair.to_json()
    pair2 = tg.pair_from_json(d)
    assert pair2.to_json() == d
    Ts = np.linspace(1.0, 3.0, 11)
    assert np.allclose(pair2.rho.value(Ts), pair.rho.value(Ts))


def test_material_json_rejects_unknown_family():
    with pytest.raises(InvalidMaterial):
        tg.model_from_json({"family": "cubic", "a": 1.0})
    with pytest.raises(InvalidMaterial):
        tg.model_from_json({"family": "linear", "a": 1.0})  # missing b
