import math

import numpy as np
import pytest

from conftest import CONFIGS
from polykern import hilbert as H
from polykern.errors import DomainError
from polykern.kernels import KernelParams, random_points
from polykern.mobius import LiftedMobiusFactor, LiftedMobiusTuple


def test_monomial_norms():
    assert H.monomial_norms([2.0], 3)[(0,)] == 1
    np.testing.assert_allclose(H.monomial_norms([2.0], 3)[(3,)], 0.25)
    np.testing.assert_allclose(H.monomial_norms([1.0, 2.0], 2)[(1, 1)], 0.5)


def test_gamma_apply_examples():
    lam = 2.7
    p = KernelParams.create((1,), lam)
    v = H.gamma_apply((0,), p, {(1,): 1.0})
    np.testing.assert_allclose(v(np.array([0.3])), [0.3, 1 / lam])
    v = H.gamma_apply((1,), p, {(0,): 1.0})
    np.testing.assert_allclose(v(np.array([0.3])), [0, 1])
    assert H.gamma_apply((0,), p, {}).is_zero()
    with pytest.raises(DomainError):
        H.gamma_apply((2,), p, {(0,): 1.0})


def test_discrete_series_examples():
    f = lambda x: x**2 + 1
    np.testing.assert_allclose(H.discrete_series_apply(LiftedMobiusFactor(), 3.0, f, 0.4j), f(0.4j))
    g = LiftedMobiusFactor(0.5, 0)
    np.testing.assert_allclose(H.discrete_series_apply(g, 2.0, lambda x: np.ones_like(x), 0), 0.75)
    assert H.discrete_series_apply(g, 2.0, lambda x: x, 0.5) == 0


def test_intertwining_identity(params):
    f = {(0,) * params.n: 1.0, (1,) + (0,) * (params.n - 1): 2j}
    z = random_points(np.random.default_rng(1), 4, params.n)
    for beta in params.family:
        assert H.verify_intertwining(beta, params, LiftedMobiusTuple.identity(params.n), f, z) <= 1e-14


def test_intertwining_c1_example():
    p = KernelParams.create((2,), 2.0)
    z = random_points(np.random.default_rng(2), 10, 1)
    assert H.verify_intertwining((0,), p, LiftedMobiusTuple.from_arrays([0.5]), {(1,): 1.0}, z) <= 1e-8


def test_intertwining_c2_example(rng):
    p = KernelParams.create((0, 1), (2, 3))
    g = LiftedMobiusTuple.random(rng, 2, angle=10)
    z = random_points(rng, 10, 2)
    assert H.verify_intertwining((0, 1), p, g, {(1, 0): 1.0}, z) <= 1e-8


def test_intertwining_random_suite(params, rng):
    pool = H.monomials(params.n, 3)
    for beta in params.family:
        for _ in range(4):
            g = LiftedMobiusTuple.random(rng, params.n, angle=10)
            picks = rng.choice(len(pool), 3, replace=False)
            f = {pool[k]: complex(*rng.normal(size=2)) for k in picks}
            assert H.verify_intertwining(beta, params, g, f, random_points(rng, 3, params.n)) <= 1e-8


def _random_tuple(rng, model, degree):
    low = H.monomials(model.params.n, degree)
    return {b: {m: complex(*rng.normal(size=2)) for m in low} for b in model.params.family}


def test_reproducing_property(params, rng):
    model = H.TruncatedSpaceModel(params, sum(params.alpha) + 4)
    for _ in range(5):
        F = _random_tuple(rng, model, model.N - 2)
        w = random_points(rng, 1, params.n)[0]
        xi = rng.normal(size=params.r) + 1j * rng.normal(size=params.r)
        lhs = model.inner(F, model.kernel_section(w, xi))
        rhs = np.vdot(xi, model.gamma(F)(w))
        assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def test_gamma_injective(params):
    sv = np.linalg.svd(H.TruncatedSpaceModel(params, 6).gamma_matrix(), compute_uv=False)
    assert sv[-1] > 1e-10


def test_model_degree_guard():
    with pytest.raises(DomainError):
        H.TruncatedSpaceModel(KernelParams.create((2,), 2.0), 3)


def test_multiplication_entries():
    p = KernelParams.create((0,), 2.0)
    M = H.multiplication_matrix(p, 0, 4)
    np.testing.assert_allclose(M[1, 0], math.sqrt(0.5))
    norms = [np.linalg.norm(H.multiplication_matrix(p, 0, N), 2) for N in range(2, 12)]
    assert all(a <= b + 1e-15 for a, b in zip(norms, norms[1:]))
    assert norms[-1] <= 1 + 1e-9


@pytest.mark.parametrize("name", ["C2", "C3"])
def test_multiplication_commute_on_interior(name):
    params = CONFIGS[name]()
    model = H.TruncatedSpaceModel(params, 6)
    M0, M1 = model.multiplication_matrix(0), model.multiplication_matrix(1)
    interior = np.array([sum(m) <= model.N - 2 for _, m in model.basis])
    np.testing.assert_allclose((M0 @ M1 - M1 @ M0)[:, interior], 0, atol=1e-14)


def test_adjoint_eigenvector_decay(params, rng):
    w = random_points(rng, 1, params.n, radius=0.5)[0]
    xi = rng.normal(size=params.r) + 0j
    res = []
    for N in (4, 8, 12, 16):
        if N < sum(params.alpha) + 2:
            continue
        model = H.TruncatedSpaceModel(params, N)
        v = model.kernel_vector(w, xi)
        r = max(np.linalg.norm(model.multiplication_matrix(i).T @ v - np.conj(w[i]) * v) for i in range(params.n))
        res.append(r / np.linalg.norm(v))
    assert all(b < a for a, b in zip(res, res[1:]))
    assert res[-1] < 1e-3


def test_poly_json_roundtrip():
    f = {(1, 0): 0.5 + 1j, (0, 2): -2.0 + 0j}
    assert H.poly_from_json(H.poly_to_json(f)) == f
