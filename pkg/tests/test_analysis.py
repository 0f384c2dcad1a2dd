import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONFIGS
from polykern import analysis as A
from polykern import multiindex as mi
from polykern.errors import IncomparableError, NoWitnessError, WitnessSearchError
from polykern.kernels import KernelParams, random_points, taylor_coefficients, tensor_kernel


def diag_curvature_by_hand(p, i):
    # entrywise: lam_i + 2 theta_i - (theta_i+1)^2 b_theta / b_{theta+e} + theta_i^2 b_{theta-e} / b_theta
    fam, b, e = p.family, p.b, mi.unit(p.n, i)
    out = []
    for k, th in enumerate(fam):
        v = p.lam[i] + 2 * th[i]
        up = mi.add(th, e)
        if up in fam:
            v -= (th[i] + 1) ** 2 * b[k] / b[fam.index(up)]
        if th[i] > 0:
            v += th[i] ** 2 * b[fam.index(mi.sub(th, e))] / b[k]
        out.append(v)
    return np.array(out)


def test_c1_diagonal_curvature():
    p = CONFIGS["C1"]()
    K = A.curvature_closed(p, 0, 0)
    np.testing.assert_allclose(np.diag(K.matrix).real, [4 / 3, 44 / 21, 60 / 7], rtol=0, atol=1e-12)
    np.testing.assert_allclose(K.matrix, np.diag(np.diag(K.matrix)), atol=0)
    assert abs(K.trace - 12) <= 1e-12


def test_closed_diagonal_by_hand(params):
    for i in range(params.n):
        np.testing.assert_allclose(np.diag(A.curvature_closed(params, i, i).matrix).real, diag_curvature_by_hand(params, i), rtol=1e-14)


def test_c2_mixed_curvature():
    p = CONFIGS["C2"]()
    M = A.curvature_closed(p, 0, 1).matrix
    want = np.zeros((3, 3))
    want[p.family.index((0, 1)), p.family.index((1, 0))] = 1 / math.sqrt(2)
    np.testing.assert_allclose(M, want, atol=1e-10)


def test_oracle_agrees_with_closed(params):
    raw = taylor_coefficients(params, 2)
    nrm = taylor_coefficients(params, 2, use_normalized=True)
    for i, j in itertools.product(range(params.n), repeat=2):
        closed = A.curvature_closed(params, i, j).matrix
        oracle = A.curvature_oracle(params, i, j, coefficients=raw if i == j else nrm)
        assert np.abs(oracle - closed).max() <= 1e-7 * max(1, np.abs(closed).max())
        if i == j:
            # both conventions agree on the diagonal components
            np.testing.assert_allclose(A.curvature_oracle(params, i, i, True, coefficients=nrm), closed, atol=1e-7)
            np.testing.assert_allclose(oracle - np.diag(np.diag(oracle)), 0, atol=1e-9)


def test_oracle_computes_its_own_coefficients():
    p = CONFIGS["C1"]()
    np.testing.assert_allclose(np.diag(A.curvature_oracle(p, 0, 0)).real, [4 / 3, 44 / 21, 60 / 7], atol=1e-7)


def test_tensor_baseline():
    src = tensor_kernel([2.0, 3.0])
    assert np.linalg.norm(A.curvature_oracle(src, 0, 1)) <= 1e-12
    assert np.linalg.norm(A.curvature_oracle(src, 1, 0)) <= 1e-12
    for i, lam in enumerate([2.0, 3.0]):
        np.testing.assert_allclose(A.curvature_oracle(src, i, i, use_normalized=False), [[lam]], atol=1e-10)
    blocky = tensor_kernel([KernelParams.create((1,), 2.0), KernelParams.create((2,), 1.5)])
    assert np.linalg.norm(A.curvature_oracle(blocky, 0, 1)) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.2, 5.0), min_size=4, max_size=4))
def test_telescoping_trace(weights):
    p = CONFIGS["C3"]().replace(mu=[1.0] + weights)
    for i in range(p.n):
        tr = A.curvature_closed(p, i, i).trace
        assert abs(tr - (p.r * p.lam[i] + 2 * p.family.degrees(i).sum())) <= 1e-12 * max(1, tr)


def test_recover_lambda(params, rng):
    assert np.allclose(A.recover_lambda(params), params.lam, atol=1e-9, rtol=0)
    for _ in range(10):
        mu = np.concatenate([[1.0], rng.uniform(0.3, 3.0, params.r - 1)])
        np.testing.assert_allclose(A.recover_lambda(params.replace(mu=mu)), params.lam, atol=1e-9, rtol=0)


def test_boundedness_c1():
    w = A.boundedness_witness(CONFIGS["C1"]())
    assert w.eps == (1.0,) and w.c == (1.0,)
    np.testing.assert_allclose([w.mu_prime[m] ** 2 for m in [(0,), (1,), (2,)]], [1, 0.5, 2 / 3], rtol=1e-14)
    np.testing.assert_allclose(w.reduced.b, w.params.b, rtol=1e-14)


def test_boundedness_factorization(params, rng):
    w = A.boundedness_witness(params)
    z, x = random_points(rng, 50, params.n), random_points(rng, 50, params.n)
    assert w.factorization_residual(z, x) <= 1e-10
    pts = random_points(rng, 20, params.n)
    for j in range(params.n):
        G = w.scaled_gram(pts, j)
        ev = np.linalg.eigvalsh(G)
        assert ev[0] >= -1e-10 * abs(ev[-1])


def test_boundedness_degenerate():
    with pytest.raises(WitnessSearchError):
        A.boundedness_witness(KernelParams.create((2,), 2.0**-21))


def test_commutant_of_identity():
    assert A.commutant_dimension([np.eye(4)]) == 16
    # a single Jordan block commutes only with its polynomials
    J = np.diag(np.ones(3), 1)
    assert A.commutant_dimension([J]) == 4
    assert A.commutant_dimension([J, J.T]) == 1


def test_irreducibility(params):
    cert = A.irreducibility_certificate(params)
    assert cert.commutant_dimension == 1 and cert.irreducible
    assert cert.order == 2 * sum(params.alpha) + 2


def test_irreducibility_low_order_is_inconclusive():
    # order 2 only sees the first shift links; the certificate must not claim more
    cert = A.irreducibility_certificate(CONFIGS["C1"](), 2)
    assert cert.commutant_dimension == 3
    assert not cert.irreducible and cert.verdict == "inconclusive"


def test_axis_coefficients_c1():
    p = CONFIGS["C1"]()
    c = A.axis_coefficients(p, 0, 2)
    np.testing.assert_allclose(c[0], 0, atol=1e-12)
    assert abs(c[1][0, 1]) > 1e-8
    assert A.axis_diagnostic(p, 0, 2, c).covered


def test_axis_support_pattern(params):
    for i in range(params.n):
        d = A.axis_diagnostic(params, i, max(params.alpha) + 1)
        assert d.covered and d.off_pattern <= 1e-8


def test_axis_short_range_is_inconclusive():
    d = A.axis_diagnostic(CONFIGS["C1"](), 0, 1, [np.zeros((3, 3)), np.zeros((3, 3))])
    assert not d.covered and d.verdict == "inconclusive"


@pytest.mark.parametrize("alpha", [(2, 0), (0, 1)])
def test_witness_examples(alpha):
    w = A.inequivalence_witness(alpha)
    assert (w.theta, w.i, w.j) == ((1, 0), 0, 1)


@pytest.mark.parametrize("alpha", [(1, 0), (0, 0), (3,)])
def test_witness_guard(alpha):
    with pytest.raises(NoWitnessError):
        A.inequivalence_witness(alpha)


def test_witness_scan():
    rows = A.witness_scan()
    assert rows and all(holds for _, _, holds in rows)


def test_witness_entry_nonzero():
    rng = np.random.default_rng(11)
    for alpha in [(2, 0), (0, 1), (1, 1), (0, 2), (1, 0, 1), (0, 0, 2)]:
        fam = mi.index_family(alpha)
        mu = np.concatenate([[1.0], rng.uniform(0.5, 2, fam.r - 1)])
        p = KernelParams.create(alpha, rng.uniform(0.5, 3, len(alpha)), mu)
        entry, predicted = A.witness_entry(p, A.inequivalence_witness(alpha))
        assert predicted > 1e-10
        np.testing.assert_allclose(entry, predicted, rtol=1e-12)


def test_classify_examples():
    p = CONFIGS["C1"]()
    v = A.classify_pair(p, p.replace(lam=2.5))
    assert not v.equivalent and v.witness["kind"] == "trace"
    np.testing.assert_allclose(v.witness["values"], [12, 13.5])
    v = A.classify_pair(p, p.replace(mu=[1, 1, 2]))
    assert not v.equivalent and v.witness["kind"] == "B"
    np.testing.assert_allclose(v.witness["values"], [7 / 3, 16 / 3])


def test_classify_reflexive(params):
    assert A.classify_pair(params, params).equivalent
    assert A.classify_pair(params, KernelParams.create(params.alpha, params.lam, dict(params.mu))).equivalent


def test_classify_incomparable():
    with pytest.raises(IncomparableError):
        A.classify_pair(CONFIGS["C2"](), CONFIGS["C3"]())


@settings(max_examples=30, deadline=None)
@given(st.lists(st.sampled_from([1.5, 2.0, 2.5]), min_size=3, max_size=3), st.lists(st.sampled_from([0.5, 1.0]), min_size=3, max_size=3))
def test_classify_is_equality(lams, mus):
    ps = [KernelParams.create((1, 1), (lams[k], 2.0), [1, mus[k], 1, 1, 1]) for k in range(3)]
    for a, b in itertools.product(ps, repeat=2):
        assert A.classify_pair(a, b).equivalent == (a == b)
        assert A.classify_pair(a, b).equivalent == A.classify_pair(b, a).equivalent
