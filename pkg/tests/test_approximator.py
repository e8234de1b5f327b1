import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import dawsn

from injlock.errors import ConditioningError, SchemaError, ShapeError, UnderResolvedError, UsageError
from injlock.field_math import sign_a
from injlock.approximator import (
    RidgeApprox,
    SignAExpansion,
    SignumApprox1D,
    approx_from_dict,
    center_grid,
    compose_ridge_expansion,
    dumps,
    emit_network,
    eval_composed,
    eval_expansion,
    eval_ridge,
    eval_signum_1d,
    fit_signum_1d,
    hilbert_transform,
    loads,
    radon_transform,
    ridge_decompose,
    ridge_inputs,
    tikhonov_fit,
)
from injlock.approximator.tikhonov import disc_grid, h2_norm, laplacian
from injlock.network import eval_layered

# ---------------------------------------------------------------- signum 1-D


def test_signum_interpolates_at_midpoints():
    ap = fit_signum_1d(np.cos, 2.0, 10)
    mids = ap.centers[:-1] + ap.a_step / 2
    np.testing.assert_allclose(eval_signum_1d(ap, mids), np.cos(mids), atol=1e-12)


def test_signum_step_function_is_exact():
    ap = fit_signum_1d(np.sign, 1.0, 4)
    x = np.array([-0.9, -0.1, 0.1, 0.9])
    np.testing.assert_allclose(eval_signum_1d(ap, x), np.sign(x))


def test_signum_constant_case():
    ap = fit_signum_1d(lambda x: x**2, 1.0, 0)
    assert ap.c == pytest.approx(0.5)
    assert eval_signum_1d(ap, 0.3) == pytest.approx(0.5)


def test_signum_from_samples():
    xs = np.linspace(-1, 1, 201)
    a = fit_signum_1d((xs, xs**3), 1.0, 16)
    b = fit_signum_1d(lambda x: x**3, 1.0, 16)
    assert np.max(np.abs(a.b - b.b)) < 1e-3
    with pytest.raises(UsageError):
        fit_signum_1d((xs[:50], xs[:50]), 1.0, 4)


def test_signum_validation():
    with pytest.raises(UsageError):
        fit_signum_1d(np.sin, -1.0, 4)
    with pytest.raises(UsageError):
        fit_signum_1d(np.sin, 1.0, -1)
    with pytest.raises(UsageError):
        SignumApprox1D(0.1, 2, [1.0, 2.0], 0.0, 1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.integers(4, 64))
def test_signum_lipschitz_bound(freq, N):
    # |phi - f| <= Lip(f) * a_step on [-L, L]
    L = 2.0
    ap = fit_signum_1d(lambda x: np.sin(freq * x), L, N)
    x = np.linspace(-L, L, 4001)
    err = np.max(np.abs(eval_signum_1d(ap, x) - np.sin(freq * x)))
    assert err <= freq * ap.a_step + 1e-12


# ---------------------------------------------------------------- Tikhonov


def test_center_grids_are_nested():
    coarse, fine = center_grid(1.0, 0.25), center_grid(1.0, 0.125)
    assert all(np.min(np.abs(fine - z)) < 1e-12 for z in coarse)
    assert np.all(np.abs(fine) <= 1.0 + 1e-12)


def test_laplacian_exact_on_quadratics():
    q = 0.05
    pts, mask = disc_grid(1.0, q)
    f = pts.real**2 + 3 * pts.imag**2 - pts.real * pts.imag
    lap = laplacian(mask, q) @ f
    np.testing.assert_allclose(lap, 8.0, atol=1e-8)


def test_h2_norm_of_constant():
    q = 0.05
    pts, mask = disc_grid(1.0, q)
    # (1 - Laplacian) 1 = 1, so the norm is sqrt(area)
    assert h2_norm(np.ones(pts.size), mask, q) == pytest.approx(math.sqrt(pts.size) * q)


def test_tikhonov_report_and_defaults():
    fit = tikhonov_fit(lambda u: np.exp(-np.abs(u) ** 2), 1.0, center_grid(1.0, 0.25))
    rep = fit.report
    assert rep.gamma > 0 and rep.condition >= 1 and rep.n_centers == fit.centers.size
    assert rep.residual_sup < 0.5


def test_tikhonov_conditioning_error():
    z = center_grid(0.5, 0.25)
    with pytest.raises(ConditioningError) as exc:
        tikhonov_fit(lambda u: u, 1.0, np.concatenate([z, z]), gamma=1e-30)
    assert exc.value.condition > 1e14


def test_tikhonov_validation():
    with pytest.raises(UsageError):
        tikhonov_fit(lambda u: u, 1.0, [])
    with pytest.raises(UsageError):
        tikhonov_fit(lambda u: u, 1.0, [0j], gamma=-1.0)
    with pytest.raises(UsageError):
        SignAExpansion([0j, 1j], [1.0], 0.1, 1.0)


def test_eval_expansion_direct():
    ex = SignAExpansion([0.5, -0.5j], [2.0, 1j], 0.3, 1.0)
    u = np.array([0.1 + 0.2j, -0.7])
    want = 2 * sign_a(u - 0.5, 0.3) + 1j * sign_a(u + 0.5j, 0.3)
    np.testing.assert_allclose(eval_expansion(ex, u), want)


# ---------------------------------------------------------------- Radon / Hilbert


def test_radon_of_gaussian():
    g = lambda z: np.exp(-np.abs(z) ** 2 * 36)  # noqa: E731  (negligible outside |z|<1)
    s = np.linspace(-0.8, 0.8, 17)
    got = radon_transform(g, 0.3, s)
    np.testing.assert_allclose(got, math.sqrt(math.pi / 36) * np.exp(-36 * s**2), atol=1e-9)


def test_radon_direction_validation():
    with pytest.raises(UsageError):
        radon_transform(lambda z: np.ones(z.shape), [1.0, 1.0], 0.0)
    assert radon_transform(lambda z: np.ones(z.shape), [0.0, 1.0], 0.0) == pytest.approx(2.0)
    assert radon_transform(lambda z: np.ones(z.shape), 0.0, 1.5) == 0.0


def test_hilbert_of_gaussian_matches_dawson():
    t = np.linspace(-80, 80, 8192)
    H = hilbert_transform(np.exp(-t**2))
    assert np.max(np.abs(H - 2 / math.sqrt(math.pi) * dawsn(t))) < 1e-3


def test_hilbert_of_cosine():
    n = 512
    t = np.arange(n) * 2 * math.pi / n
    np.testing.assert_allclose(hilbert_transform(np.cos(5 * t), pad=1), np.sin(5 * t), atol=1e-12)


def test_ridge_needs_directions():
    with pytest.raises(UnderResolvedError):
        ridge_decompose(lambda z: np.ones(z.shape), K=4)
    with pytest.raises(UsageError):
        ridge_decompose(lambda z: np.ones(z.shape), K=8, h=-1.0)


def test_ridge_shapes():
    ap = ridge_decompose(lambda z: np.where(np.abs(z) < 1, 1 - np.abs(z) ** 2, 0.0), K=16, h=1 / 16)
    assert ap.coeffs.shape == (16, 2 * ap.L)
    np.testing.assert_allclose(np.linalg.norm(ap.directions, axis=1), 1.0)
    with pytest.raises(ShapeError):
        RidgeApprox(ap.thetas, ap.V[:-1], ap.h, ap.L, ap.coeffs, ap.C)


# ---------------------------------------------------------------- emission


def test_emit_signum_parity():
    ap = fit_signum_1d(np.sin, math.pi, 32)
    model = emit_network(ap)
    x = np.linspace(-3, 3, 301) + 1e-3
    net = eval_layered(model, x[:, None])[:, 0]
    np.testing.assert_allclose(net.real, eval_signum_1d(ap, x), atol=1e-12)
    assert np.max(np.abs(net.imag)) < 1e-12


def test_emit_expansion_parity():
    ex = SignAExpansion([0.1, -0.2 + 0.3j, 0.5j], [1.0, -0.5j, 0.25], 0.2, 1.0)
    model = emit_network(ex)
    u = np.array([0.3, -0.4j, 0.2 + 0.2j])
    np.testing.assert_allclose(eval_layered(model, u[:, None])[:, 0], eval_expansion(ex, u), atol=1e-14)


def test_emit_ridge_parity():
    ap = ridge_decompose(lambda z: np.where(np.abs(z) < 1, z.imag, 0.0), K=16, h=1 / 16, a=0.05)
    z = np.array([0.1 + 0.2j, -0.5j, 0.3])
    net = eval_layered(emit_network(ap), ridge_inputs(z))[:, 0]
    np.testing.assert_allclose(net, eval_ridge(ap, z), atol=1e-12)


def test_emit_rejects_unknown():
    with pytest.raises(UsageError):
        emit_network("not an approximation")


def test_composition_is_structurally_exact():
    ridge = ridge_decompose(lambda z: np.where(np.abs(z) < 1, z.real, 0.0), K=8, h=0.25, a=0.2)
    inner = tikhonov_fit(lambda u: sign_a(u.real, 0.2), 1.6, center_grid(1.6, 0.4), a=0.2)
    model = compose_ridge_expansion(ridge, inner)
    z = np.array([0.1 + 0.1j, -0.3 + 0.2j, 0.5j])
    np.testing.assert_allclose(eval_layered(model, z[:, None])[:, 0], eval_composed(ridge, inner, z), atol=1e-10)


# ---------------------------------------------------------------- serialization


def test_serialization_roundtrip():
    items = [
        fit_signum_1d(np.sin, 1.0, 4),
        tikhonov_fit(lambda u: u, 1.0, center_grid(0.5, 0.25)),
        ridge_decompose(lambda z: np.where(np.abs(z) < 1, 1.0, 0.0), K=8, h=0.25),
    ]
    z = np.array([0.1 + 0.2j, -0.33 - 0.3j])
    for ap in items:
        back = loads(dumps(ap))
        assert type(back) is type(ap)
        assert dumps(back) == dumps(ap)
        np.testing.assert_array_equal(eval_layered(emit_network(back), _inputs(back, z)),
                                      eval_layered(emit_network(ap), _inputs(ap, z)))
    with pytest.raises(SchemaError):
        approx_from_dict({"kind": "spline"})
    with pytest.raises(SchemaError):
        loads("[1, 2")


def _inputs(ap, z):
    if isinstance(ap, RidgeApprox):
        return ridge_inputs(z)
    if isinstance(ap, SignumApprox1D):
        return z.real[:, None]
    return z[:, None]
