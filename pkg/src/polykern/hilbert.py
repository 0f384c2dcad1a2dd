"""Finite-degree model of the Hilbert spaces behind the kernels.

Scalar polynomials are dicts ``{multi-index: coefficient}``. A tuple of them,
one per member ``beta`` of the index family, is stored as a dict
``{beta: polynomial}`` and represents an element of the orthogonal direct
sum of the weighted Bergman spaces with parameters ``lambda + 2 beta``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .cauchy import cauchy_derivative_oracle
from .errors import DomainError
from .mobius import act, cocycle_eval, derivative_power


def monomials(n, N):
    """Multi-indices of total degree <= N in graded co-lex order."""
    out = [m for m in itertools.product(range(N + 1), repeat=n) if sum(m) <= N]
    out.sort(key=mi.colex_key)
    return out


def monomial_norms(nu, N):
    """Squared norms ``m! / (nu)_m`` of the monomials in the space with kernel ``(1 - z w*)^-nu``."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    return {m: mi.multi_factorial(m) / mi.multi_pochhammer(nu, m) for m in monomials(nu.size, N)}


def poly_eval(f, z):
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape[:-1], dtype=complex)
    for m, c in f.items():
        out = out + c * np.prod(z ** np.asarray(m), axis=-1)
    return out


def poly_derivative(f, d):
    out = {}
    for m, c in f.items():
        if mi.leq(d, m):
            k = mi.sub(m, d)
            out[k] = out.get(k, 0) + c * math.prod(math.perm(mj, dj) for mj, dj in zip(m, d))
    return out


def poly_from_json(data):
    """``{"1,0": [re, im], ...}`` -> polynomial dict."""
    return {mi.parse_multiindex(k): complex(v[0], v[1]) for k, v in data.items()}


def poly_to_json(f):
    return {mi.format_multiindex(m): [complex(c).real, complex(c).imag] for m, c in sorted(f.items(), key=lambda kv: mi.colex_key(kv[0]))}


@dataclass
class VectorPolynomial:
    coefficients: dict
    r: int
    degree: int = field(default=0)

    def __post_init__(self):
        if self.coefficients:
            self.degree = max(self.degree, max(sum(m) for m in self.coefficients))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape[:-1] + (self.r,), dtype=complex)
        for m, vec in self.coefficients.items():
            out = out + np.prod(z ** np.asarray(m), axis=-1)[..., None] * vec
        return out

    def is_zero(self, tol=0.0):
        return all(np.max(np.abs(v)) <= tol for v in self.coefficients.values())


def gamma_apply(beta, params, f) -> VectorPolynomial:
    """Component ``gamma`` is ``C(gamma, beta) d^(gamma-beta) f / (lam + 2 beta)_(gamma-beta)``."""
    beta = tuple(beta)
    if beta not in params.family:
        raise DomainError(f"{beta} is not in the index family")
    nu = np.asarray(params.lam) + 2 * np.asarray(beta)
    coeffs = {}
    for p, gamma in enumerate(params.family):
        c = mi.multi_binomial(gamma, beta)
        if not c:
            continue
        d = mi.sub(gamma, beta)
        scale = c / mi.multi_pochhammer(nu, d)
        for m, val in poly_derivative(f, d).items():
            vec = coeffs.setdefault(m, np.zeros(params.r, dtype=complex))
            vec[p] += scale * val
    return VectorPolynomial(coeffs, params.r)


def discrete_series_apply(g, t, f, w):
    """``(g')^(t/2) (f o g)`` at ``w``; ``g`` a factor or a tuple, ``f`` a callable on points."""
    from .mobius import LiftedMobiusFactor, LiftedMobiusTuple

    if isinstance(g, LiftedMobiusFactor):
        return derivative_power(g, w, t / 2) * f(g(w))
    w = np.asarray(w, dtype=complex)
    t = np.broadcast_to(np.asarray(t, dtype=float), (g.n,))
    weight = np.prod([derivative_power(gi, w[..., i], t[i] / 2) for i, gi in enumerate(g)], axis=0)
    return weight * f(act(g, w))


def verify_intertwining(beta, params, g, f, sample, radius=None, nodes=64):
    """Max over ``sample`` of ``|Gamma_beta(D f)(z) - J(g, z) (Gamma_beta f)(g z)|``.

    The left side is differentiated with the Cauchy oracle, so it never sees
    the closed expansion that produces the multiplier.
    """
    beta = tuple(beta)
    nu = np.asarray(params.lam) + 2 * np.asarray(beta)
    moved = lambda pts: discrete_series_apply(g, nu, lambda x: poly_eval(f, x), pts)
    gf = gamma_apply(beta, params, f)
    worst = 0.0
    for z in np.atleast_2d(np.asarray(sample, dtype=complex)):
        rho = radius if radius is not None else min(0.4, (1 - np.max(np.abs(z))) / 2)
        lhs = np.zeros(params.r, dtype=complex)
        for p, gamma in enumerate(params.family):
            c = mi.multi_binomial(gamma, beta)
            if c:
                d = mi.sub(gamma, beta)
                lhs[p] = c / mi.multi_pochhammer(nu, d) * cauchy_derivative_oracle(moved, z, d, rho, nodes)
        rhs = cocycle_eval(g, z, params) @ gf(act(g, z))
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


class TruncatedSpaceModel:
    """The direct sum of the weighted Bergman spaces cut off at total degree ``N``."""

    def __init__(self, params, N):
        if N < sum(params.alpha) + 2:
            raise DomainError(f"degree cutoff must be >= |alpha| + 2 = {sum(params.alpha) + 2}")
        self.params = params
        self.N = N
        self.monomials = monomials(params.n, N)
        self.norms = {
            beta: monomial_norms(np.asarray(params.lam) + 2 * np.asarray(beta), N) for beta in params.family
        }
        self.basis = [(beta, m) for beta in params.family for m in self.monomials]

    @property
    def dim(self):
        return len(self.basis)

    def inner(self, F, G):
        """Inner product of two tuples ``{beta: polynomial}`` (linear in ``F``)."""
        total = 0j
        for beta, f in F.items():
            g = G.get(beta, {})
            norms = self.norms[beta]
            for m, c in f.items():
                if m in g:
                    total += c * np.conj(g[m]) * norms[m]
        return total

    def gamma(self, F) -> VectorPolynomial:
        """Image under sum_beta mu_beta Gamma_beta."""
        coeffs = {}
        for beta, f in F.items():
            vp = gamma_apply(beta, self.params, f)
            for m, vec in vp.coefficients.items():
                coeffs[m] = coeffs.get(m, 0) + self.params.mu[beta] * vec
        return VectorPolynomial(coeffs, self.params.r)

    def kernel_section(self, w, xi):
        """Preimage tuple of the truncated kernel section ``K_N(., w) xi``."""
        params = self.params
        w = np.asarray(w, dtype=complex)
        out = {}
        for beta in params.family:
            nu = np.asarray(params.lam) + 2 * np.asarray(beta)
            poly = {}
            for theta, x in zip(params.family, xi):
                c = mi.multi_binomial(theta, beta)
                if not c or x == 0:
                    continue
                d = mi.sub(theta, beta)
                scale = params.mu[beta] * x * c / mi.multi_pochhammer(nu, d)
                for m in self.monomials:
                    if mi.leq(d, m):
                        k = mi.sub(m, d)
                        dk = math.prod(math.perm(mj, dj) for mj, dj in zip(m, d))
                        poly[m] = poly.get(m, 0) + scale * dk * np.prod(np.conj(w) ** np.asarray(k)) / self.norms[beta][m]
            out[beta] = poly
        return out

    def gamma_matrix(self):
        """Matrix of the linear map Gamma from tuple coefficients to vector-polynomial coefficients."""
        params = self.params
        row_of = {(gamma, m): k for k, (gamma, m) in enumerate((g, m) for g in params.family for m in self.monomials)}
        G = np.zeros((len(row_of), self.dim))
        for col, (beta, m) in enumerate(self.basis):
            vp = gamma_apply(beta, params, {m: params.mu[beta]})
            for k, vec in vp.coefficients.items():
                for p, gamma in enumerate(params.family):
                    if vec[p] != 0:
                        G[row_of[gamma, k], col] = vec[p].real
        return G

    def multiplication_matrix(self, i):
        """Multiplication by ``z_i`` in the orthonormal monomial basis; degree ``N`` columns map to zero."""
        e = mi.unit(self.params.n, i)
        pos = {b: k for k, b in enumerate(self.basis)}
        M = np.zeros((self.dim, self.dim))
        for col, (beta, m) in enumerate(self.basis):
            target = (beta, mi.add(m, e))
            if target in pos:
                nu = self.params.lam[i] + 2 * beta[i]
                M[pos[target], col] = math.sqrt((m[i] + 1) / (nu + m[i]))
        return M

    def kernel_vector(self, w, xi):
        """Orthonormal coordinates of ``sum_beta xi_beta K^(lam+2beta)_N(., w)``."""
        w = np.asarray(w, dtype=complex)
        v = np.zeros(self.dim, dtype=complex)
        weights = dict(zip(self.params.family, xi))
        for k, (beta, m) in enumerate(self.basis):
            v[k] = weights[beta] * np.prod(np.conj(w) ** np.asarray(m)) / math.sqrt(self.norms[beta][m])
        return v


def multiplication_matrix(params, i, N):
    return TruncatedSpaceModel(params, N).multiplication_matrix(i)
