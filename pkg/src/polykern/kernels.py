"""Matrix-valued quasi-invariant kernels on the polydisc.

Every kernel evaluator in this module is batched: ``z`` and ``w`` are arrays
of shape ``(..., n)`` (broadcast against each other) and the result has shape
``(..., r, r)``. Rows and columns are indexed by the family members in
graded co-lex order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import multiindex as mi
from ._linalg import hermitian_power, nilpotent_exp, weighted_sum
from .cauchy import cauchy_coefficients
from .errors import DimensionError, DomainError, GeometryError

DEFAULT_RADIUS = 0.4
DEFAULT_NODES = 20


@dataclass(frozen=True)
class KernelParams:
    """One member ``(alpha, lambda, mu)`` of the family.

    ``mu`` maps each member of the index family to a positive weight, with
    weight 1 on the zero index. Build instances with :meth:`create`.
    """

    alpha: tuple
    lam: tuple
    mu: dict = field(hash=False)

    def __post_init__(self):
        fam = self.family
        if len(self.lam) != fam.n:
            raise DimensionError(f"lambda has {len(self.lam)} entries, alpha has {fam.n}")
        if any(not (x > 0) for x in self.lam):
            raise DomainError(f"lambda must be entrywise positive, got {self.lam}")
        if set(self.mu) != set(fam.members):
            raise DomainError("mu must have exactly one entry per member of the index family")
        if any(not (v > 0) for v in self.mu.values()):
            raise DomainError("mu entries must be positive")
        if self.mu[(0,) * fam.n] != 1:
            raise DomainError("mu at the zero index must equal 1")

    @classmethod
    def create(cls, alpha, lam, mu=None) -> "KernelParams":
        """``mu`` may be ``None`` (all ones), a sequence in family order, or a mapping."""
        alpha = mi.as_multiindex(alpha)
        lam = tuple(float(x) for x in np.atleast_1d(lam))
        fam = mi.index_family(alpha)
        if mu is None:
            mu = {m: 1.0 for m in fam}
        elif isinstance(mu, dict):
            mu = {tuple(int(x) for x in k): float(v) for k, v in mu.items()}
        else:
            mu = list(mu)
            if len(mu) != fam.r:
                raise DomainError(f"mu has {len(mu)} entries, the index family has {fam.r}")
            mu = {m: float(v) for m, v in zip(fam, mu)}
        return cls(alpha, lam, mu)

    def replace(self, lam=None, mu=None) -> "KernelParams":
        return KernelParams.create(self.alpha, self.lam if lam is None else lam, self.mu if mu is None else mu)

    def __eq__(self, other):
        if not isinstance(other, KernelParams):
            return NotImplemented
        return (self.alpha, self.lam, self.mu_vector.tolist()) == (other.alpha, other.lam, other.mu_vector.tolist())

    def __hash__(self):
        return hash((self.alpha, self.lam, tuple(self.mu_vector)))

    @cached_property
    def family(self) -> mi.IndexFamily:
        return mi.index_family(self.alpha)

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def r(self) -> int:
        return self.family.r

    @cached_property
    def mu_vector(self) -> np.ndarray:
        return np.array([self.mu[m] for m in self.family])

    @cached_property
    def shifts(self) -> np.ndarray:
        return np.stack([mi.shift_matrix(i, self.family) for i in range(self.n)])

    @property
    def nil_order(self) -> int:
        # any product of more than |alpha| shifts vanishes on the family
        return sum(self.alpha)

    @cached_property
    def b(self) -> np.ndarray:
        """Diagonal of K(0, 0)."""
        return L_matrix(self.lam, self.family) @ self.mu_vector**2

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alpha": list(self.alpha),
            "lambda": list(self.lam),
            "mu": {mi.format_multiindex(m): self.mu[m] for m in self.family},
        }


def _points(z, n):
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z[None]
    if z.shape[-1] != n:
        raise DimensionError(f"expected points with {n} coordinates, got shape {z.shape}")
    return z


def scalar_kernel(nu, z, w):
    """prod_i (1 - z_i conj(w_i)) ** (-nu_i), principal branch."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    z, w = _points(z, nu.size), _points(w, nu.size)
    return np.prod((1 - z * np.conj(w)) ** (-nu), axis=-1)


def _deriv_coef(nu, a, b, k):
    return (
        math.comb(b, k)
        * math.factorial(a) / math.factorial(a - k)
        * mi.pochhammer(nu, a)
        * mi.pochhammer(nu + a, b - k)
    )


def _deriv_1d(nu, a, b, x, y):
    # d_x^a d_y^b (1 - x y)^(-nu), with y standing for conj(w)
    base = 1 - x * y
    out = 0
    for k in range(min(a, b) + 1):
        out = out + _deriv_coef(nu, a, b, k) * y ** (a - k) * x ** (b - k) * base ** (-(nu + a + b - k))
    return out


def scalar_kernel_deriv(nu, a, b, z, w):
    """d_z^a dbar_w^b of :func:`scalar_kernel`, by the closed per-coordinate formula."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    z, w = _points(z, nu.size), _points(w, nu.size)
    y = np.conj(w)
    out = 1
    for i in range(nu.size):
        out = out * _deriv_1d(nu[i], a[i], b[i], z[..., i], y[..., i])
    return np.broadcast_to(out, np.broadcast_shapes(z.shape[:-1], w.shape[:-1])).astype(complex)


class _PowerTables:
    """Integer powers of x, conj(w) and 1/(1 - x conj(w)) for one coordinate, shared across blocks."""

    def __init__(self, x, y, top):
        base = 1 - x * y
        self.log_base = np.log(base)
        inv = 1 / base
        self.xp, self.yp, self.ip = [np.ones_like(base)], [np.ones_like(base)], [np.ones_like(base)]
        for _ in range(2 * top):
            self.xp.append(self.xp[-1] * x)
            self.yp.append(self.yp[-1] * y)
            self.ip.append(self.ip[-1] * inv)

    def table(self, nu, top):
        head = np.exp(-nu * self.log_base)
        out = {}
        for a in range(top + 1):
            for b in range(top + 1):
                acc = 0
                for k in range(min(a, b) + 1):
                    acc = acc + _deriv_coef(nu, a, b, k) * self.yp[a - k] * self.xp[b - k] * self.ip[a + b - k]
                out[a, b] = head * acc
        return out


def _block_coefficients(beta, params):
    """Triples (position, multiplier, s - beta) for rows s with nonzero binomial."""
    nu = np.asarray(params.lam) + 2 * np.asarray(beta)
    rows = []
    for p, s in enumerate(params.family):
        c = mi.multi_binomial(s, beta)
        if c:
            d = mi.sub(s, beta)
            rows.append((p, c / mi.multi_pochhammer(nu, d), d))
    return nu, rows


def _direct_blocks(params, z, w, betas):
    z, w = _points(z, params.n), _points(w, params.n)
    z, w = np.broadcast_arrays(z, w)
    y = np.conj(w)
    top = max(params.alpha) if params.alpha else 0
    top = max(top, max(max(m) for m in params.family))
    powers = [_PowerTables(z[..., i], y[..., i], top) for i in range(params.n)]
    out = np.zeros(z.shape[:-1] + (params.r, params.r), dtype=complex)
    for beta, weight in betas:
        nu, rows = _block_coefficients(beta, params)
        btop = max(max(d) for _, _, d in rows)
        tables = [powers[i].table(nu[i], btop) for i in range(params.n)]
        for p, cp, ds in rows:
            for q, cq, dt in rows:
                val = weight * cp * cq
                for i in range(params.n):
                    val = val * tables[i][ds[i], dt[i]]
                out[..., p, q] += val
    return out


def block_kernel_K_beta(beta, params, z, w):
    """Kernel of the image of the ``beta``-th embedding."""
    beta = tuple(beta)
    if beta not in params.family:
        raise DomainError(f"{beta} is not in the index family")
    return _direct_blocks(params, z, w, [(beta, 1.0)])


def kernel_direct_sum(params, z, w):
    """sum over beta of mu_beta^2 K_beta(z, w)."""
    return _direct_blocks(params, z, w, [(beta, params.mu[beta] ** 2) for beta in params.family])


def L_matrix(lam, family) -> np.ndarray:
    """Lower-triangular matrix with (theta, beta) entry C(theta,beta)^2 (theta-beta)! / (lam+2beta)_{theta-beta}."""
    lam = np.asarray(lam, dtype=float)
    L = np.zeros((family.r, family.r))
    for p, theta in enumerate(family):
        for q, beta in enumerate(family):
            c = mi.multi_binomial(theta, beta)
            if c:
                d = mi.sub(theta, beta)
                L[p, q] = c**2 * mi.multi_factorial(d) / mi.multi_pochhammer(lam + 2 * np.asarray(beta), d)
    return L


def kernel_at_zero(params) -> np.ndarray:
    return np.diag(params.b)


def kernel_canonical(params, z, w):
    """(1 - z w*)^(-lam) D(z w*) exp(sum w*_i S_i) B exp(sum z_i S_i^T) D(z w*)."""
    z, w = _points(z, params.n), _points(w, params.n)
    zw = z * np.conj(w)
    scalar = np.prod((1 - zw) ** (-np.asarray(params.lam)), axis=-1)
    D = mi.diagonal_matrix(zw, params.family)
    S = params.shifts
    left = nilpotent_exp(weighted_sum(np.conj(w), S), params.nil_order)
    right = nilpotent_exp(weighted_sum(z, S.transpose(0, 2, 1)), params.nil_order)
    core = D @ (left * params.b) @ right @ D
    return scalar[..., None, None] * core


def normalized_kernel(params, z, w):
    """K0(z,0)^-1 K0(z,w) K0(0,w)^-1 with K0 = B^-1/2 K B^-1/2, via the closed-form inverses.

    K0(z,0)^-1 = B^1/2 exp(-sum z_i S_i^T) B^-1/2, and symmetrically in w.
    """
    z, w = _points(z, params.n), _points(w, params.n)
    S = params.shifts
    sb = np.sqrt(params.b)
    left = nilpotent_exp(weighted_sum(-z, S.transpose(0, 2, 1)), params.nil_order)
    right = nilpotent_exp(weighted_sum(-np.conj(w), S), params.nil_order)
    K = kernel_canonical(params, z, w)
    inner = (K / params.b[:, None]) / params.b[None, :]
    return sb[:, None] * (left @ inner @ right) * sb[None, :]


def normalize(kernel):
    """Normalized-at-origin version of an arbitrary kernel evaluator, by dense inversion."""

    def evaluate(z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        zero = np.zeros(z.shape[-1], dtype=complex)
        B = np.asarray(kernel(zero, zero))
        Bm = hermitian_power(B, -0.5)
        k0 = lambda x, y: Bm @ kernel(x, y) @ Bm
        Kz0 = k0(z, zero)
        K0w = k0(zero, w)
        return np.linalg.solve(Kz0, k0(z, w)) @ np.linalg.inv(K0w)

    return evaluate


def taylor_coefficients(source, order, use_normalized=False, radius=DEFAULT_RADIUS, nodes=DEFAULT_NODES, n=None):
    """Coefficients of ``z^a conj(w)^b`` for ``|a| + |b| <= order``.

    ``source`` is either a :class:`KernelParams` (the direct-sum kernel is used,
    keeping the extraction independent of the factorized formulas) or any
    batched evaluator ``K(z, w)``; pass ``n`` in the latter case. Returns a dict
    keyed by ``(a, b)`` pairs of multi-indices.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    if not 0 < radius < 1:
        raise GeometryError(f"radius must lie in (0, 1), got {radius}")
    if isinstance(source, KernelParams):
        n = source.n
        kern = lambda z, w: kernel_direct_sum(source, z, w)
    else:
        if n is None:
            raise DimensionError("n is required for a bare evaluator")
        kern = source
    if use_normalized:
        kern = normalize(kern)

    def holo(p):
        # K(z, conj(u)) is holomorphic in (z, u)
        return kern(p[..., :n], np.conj(p[..., n:]))

    box = cauchy_coefficients(holo, np.zeros(2 * n), order, radius, nodes)
    out = {}
    for idx in np.ndindex(*(order + 1,) * (2 * n)):
        if sum(idx) <= order:
            out[(idx[:n], idx[n:])] = box[idx]
    return out


def gram_matrix(params, points, kernel=None):
    """Block matrix [K(p_i, p_j)] of size (m r) x (m r)."""
    pts = _points(points, params.n)
    kernel = kernel or (lambda z, w: kernel_canonical(params, z, w))
    blocks = kernel(pts[:, None, :], pts[None, :, :])
    m, r = pts.shape[0], blocks.shape[-1]
    return blocks.transpose(0, 2, 1, 3).reshape(m * r, m * r)


def random_points(rng, count, n, radius=0.7):
    """Uniform points of the polydisc of the given radius, shape (count, n)."""
    rad = radius * np.sqrt(rng.uniform(0, 1, (count, n)))
    return rad * np.exp(2j * np.pi * rng.uniform(0, 1, (count, n)))


def tensor_kernel(factors):
    """Pointwise tensor product of one-variable kernels.

    Each factor is a positive float ``nu`` (the scalar kernel ``(1 - z w*)^-nu``)
    or a one-variable :class:`KernelParams`. Returns ``(evaluator, n)``.
    """
    evals = []
    for f in factors:
        if isinstance(f, KernelParams):
            if f.n != 1:
                raise DimensionError("tensor factors must be one-variable kernels")
            evals.append(lambda z, w, f=f: kernel_canonical(f, z, w))
        else:
            nu = float(f)
            evals.append(lambda z, w, nu=nu: scalar_kernel([nu], z, w)[..., None, None])

    def evaluate(z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        out = None
        for i, ev in enumerate(evals):
            block = ev(z[..., i : i + 1], w[..., i : i + 1])
            if out is None:
                out = block
            else:
                s = np.broadcast_shapes(out.shape[:-2], block.shape[:-2])
                prod = np.einsum("...ij,...kl->...ikjl", out, block)
                out = prod.reshape(s + (out.shape[-2] * block.shape[-2], out.shape[-1] * block.shape[-1]))
        return out

    return evaluate, len(evals)
