"""Invariants of the family: curvature at the origin, witnesses and classification.

Coordinates are 0-based throughout. Two conventions coexist for the
curvature at the origin:

* the diagonal components ``K_ii(0)`` are computed from the raw kernel;
* the mixed components ``K_ij(0)``, ``i != j``, are computed from the kernel
  normalized so that ``K(z, 0) = I``, where they are the coefficient of
  ``z_i conj(w_j)``.

For this family the diagonal components are diagonal matrices and agree in
both conventions.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import multiindex as mi
from .cauchy import cauchy_coefficients
from .errors import DimensionError, DomainError, IncomparableError, NoWitnessError, WitnessSearchError
from .kernels import (
    DEFAULT_NODES,
    DEFAULT_RADIUS,
    KernelParams,
    L_matrix,
    gram_matrix,
    kernel_canonical,
    normalized_kernel,
    scalar_kernel,
    taylor_coefficients,
    tensor_kernel,
)

SAME_TOL = 1e-9


@dataclass(frozen=True)
class CurvatureComponent:
    i: int
    j: int
    matrix: np.ndarray = field(repr=False, compare=False)
    at_origin: bool = True
    normalized: bool = False

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)


@dataclass(frozen=True)
class ClassificationVerdict:
    equivalent: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"equivalent": self.equivalent, "witness": self.witness}


def _check_coordinate(params, *coords):
    for c in coords:
        if not 0 <= c < params.n:
            raise DimensionError(f"coordinate {c} out of range for n={params.n}")


def curvature_closed(params: KernelParams, i: int, j: int) -> CurvatureComponent:
    """Closed-form curvature component at the origin."""
    _check_coordinate(params, i, j)
    S = params.shifts
    b = params.b
    B, Binv = np.diag(b), np.diag(1 / b)
    if i == j:
        Si = S[i]
        D = np.diag(params.family.degrees(i))
        mat = params.lam[i] * np.eye(params.r) + 2 * D - Si.T @ Binv @ Si @ B + Binv @ Si @ B @ Si.T
        return CurvatureComponent(i, j, mat.astype(complex), normalized=False)
    half, ihalf = np.diag(np.sqrt(b)), np.diag(1 / np.sqrt(b))
    mat = ihalf @ S[j] @ B @ S[i].T @ ihalf - half @ S[i].T @ Binv @ S[j] @ half
    return CurvatureComponent(i, j, mat.astype(complex), normalized=True)


def _resolve_source(source):
    if isinstance(source, KernelParams):
        return source, source.n
    evaluator, n = source
    return evaluator, n


def curvature_oracle(source, i: int, j: int, use_normalized=None, coefficients=None, radius=DEFAULT_RADIUS, nodes=DEFAULT_NODES):
    """Curvature at the origin from Cauchy-extracted Taylor coefficients.

    ``source`` is a :class:`KernelParams` or an ``(evaluator, n)`` pair such as
    the one returned by :func:`tensor_kernel`. ``use_normalized=None`` picks the
    convention used by :func:`curvature_closed`. Precomputed order-2
    ``coefficients`` (of the matching kernel) may be passed to skip extraction.

    In the raw convention the metric is ``h(w) = K(conj w, conj w)``, whose
    frame ``K(., conj w)`` is holomorphic in ``w``; with ``C_ab`` the
    coefficient of ``z^a conj(w)^b`` this gives
    ``B^-1 C(e_j, e_i) - B^-1 C(e_j, 0) B^-1 C(0, e_i)``.
    """
    kern, n = _resolve_source(source)
    if not (0 <= i < n and 0 <= j < n):
        raise DimensionError(f"coordinates ({i}, {j}) out of range for n={n}")
    if use_normalized is None:
        use_normalized = i != j
    if coefficients is None:
        coefficients = taylor_coefficients(kern, 2, use_normalized, radius, nodes, n=n)
    zero = (0,) * n
    ei, ej = mi.unit(n, i), mi.unit(n, j)
    if use_normalized:
        return np.asarray(coefficients[ei, ej])
    Binv = np.linalg.inv(coefficients[zero, zero])
    return Binv @ coefficients[ej, ei] - Binv @ coefficients[ej, zero] @ Binv @ coefficients[zero, ei]


def recover_lambda(params: KernelParams) -> tuple:
    """``lambda_i = (tr K_ii(0) - 2 sum_theta theta_i) / r``; independent of ``mu``."""
    out = []
    for i in range(params.n):
        tr = curvature_closed(params, i, i).trace
        out.append(float((tr - 2 * params.family.degrees(i).sum()) / params.r))
    return tuple(out)


# ---------------------------------------------------------------- boundedness


@dataclass(frozen=True)
class BoundednessWitness:
    """``K(lam, mu) = prod_i (1 - z_i w*_i)^-eps_i K(lam - eps, mu')``, so ``M_z_j`` is bounded by ``c_j``."""

    params: KernelParams
    eps: tuple
    mu_prime: dict
    c: tuple

    @property
    def reduced(self) -> KernelParams:
        return KernelParams.create(self.params.alpha, np.subtract(self.params.lam, self.eps), self.mu_prime)

    def factorization_residual(self, z, w) -> float:
        """Max relative residual of the product identity over the given point pairs."""
        full = kernel_canonical(self.params, z, w)
        prod = scalar_kernel(self.eps, z, w)[..., None, None] * kernel_canonical(self.reduced, z, w)
        diff = np.linalg.norm(full - prod, axis=(-2, -1))
        return float(np.max(diff / np.linalg.norm(full, axis=(-2, -1))))

    def scaled_gram(self, points, j: int) -> np.ndarray:
        """Gram matrix of ``(c_j - z_j conj(w_j)) K(z, w)``."""
        cj = self.c[j]
        kernel = lambda z, w: (cj - z[..., j] * np.conj(w[..., j]))[..., None, None] * kernel_canonical(self.params, z, w)
        return gram_matrix(self.params, points, kernel)

    def to_json(self) -> dict:
        return {
            "eps": list(self.eps),
            "mu_prime": {mi.format_multiindex(k): v for k, v in self.mu_prime.items()},
            "c": list(self.c),
        }


def _forward_substitute(L, y):
    x = np.zeros_like(y)
    for k in range(len(y)):
        x[k] = (y[k] - L[k, :k] @ x[:k]) / L[k, k]
    return x


def boundedness_witness(params: KernelParams, floor=2.0**-20) -> BoundednessWitness:
    """Search ``eps`` by halving from ``min(lam)/2`` until ``mu'^2 = L(lam-eps)^-1 L(lam) mu^2 > 0``."""
    fam = params.family
    lam = np.asarray(params.lam)
    target = L_matrix(lam, fam) @ params.mu_vector**2
    start = lam.min() / 2
    eps = start
    while eps >= floor * lam.min():
        sq = _forward_substitute(L_matrix(lam - eps, fam), target)
        if np.all(sq > 0):
            mu_prime = {m: float(np.sqrt(v)) for m, v in zip(fam, sq)}
            mu_prime[(0,) * fam.n] = 1.0
            eps_t = (float(eps),) * fam.n
            return BoundednessWitness(params, eps_t, mu_prime, tuple(max(1.0, 1 / e) for e in eps_t))
        eps /= 2
    raise WitnessSearchError(f"no positive mu' found for eps down to {floor} * min(lambda)")


# ------------------------------------------------------------ irreducibility


def commutant_dimension(matrices, rtol=1e-8) -> int:
    """Dimension of ``{X : X C = C X for every C}``, by the nullity of the stacked commutator map."""
    matrices = [np.asarray(C, dtype=complex) for C in matrices]
    if not matrices:
        raise DomainError("need at least one matrix")
    r = matrices[0].shape[0]
    eye = np.eye(r)
    # vec(XC - CX) = (C^T kron I - I kron C) vec(X), column-major vec
    blocks = [np.kron(C.T, eye) - np.kron(eye, C) for C in matrices]
    sv = np.linalg.svd(np.vstack(blocks), compute_uv=False)
    scale = max(sv[0], max(np.linalg.norm(C, 2) for C in matrices))
    return int(r * r - np.sum(sv > rtol * scale))


@dataclass(frozen=True)
class IrreducibilityCertificate:
    commutant_dimension: int
    order: int

    @property
    def irreducible(self) -> bool:
        # one-sided: a larger finite commutant proves nothing
        return self.commutant_dimension == 1

    @property
    def verdict(self) -> str:
        return "irreducible" if self.irreducible else "inconclusive"

    def to_json(self) -> dict:
        return {"commutant_dimension": self.commutant_dimension, "order": self.order, "verdict": self.verdict}


def irreducibility_certificate(params: KernelParams, order=None, coefficients=None, rtol=1e-8) -> IrreducibilityCertificate:
    """Commutant of the normalized-kernel Taylor coefficients up to total degree ``order`` (default ``2|alpha|+2``)."""
    order = 2 * sum(params.alpha) + 2 if order is None else order
    if order < 2:
        raise DomainError("order must be >= 2")
    if coefficients is None:
        coefficients = taylor_coefficients(params, order, use_normalized=True)
    mats = [C for (a, b), C in coefficients.items() if sum(a) + sum(b) <= order]
    return IrreducibilityCertificate(commutant_dimension(mats, rtol), order)


# ------------------------------------------------------------ axis structure


def axis_coefficients(params: KernelParams, i: int, qmax: int, radius=DEFAULT_RADIUS, nodes=64) -> list:
    """Matrices ``c(q)``, the coefficient of ``z_i^(q+1) conj(w_i)^q`` of the normalized kernel on the ``i``-th axis."""
    _check_coordinate(params, i)
    if qmax < 1:
        raise DomainError("qmax must be >= 1")
    n = params.n

    def on_axis(p):
        z = np.zeros(p.shape[:-1] + (n,), dtype=complex)
        w = np.zeros_like(z)
        z[..., i] = p[..., 0]
        w[..., i] = np.conj(p[..., 1])
        return normalized_kernel(params, z, w)

    box = cauchy_coefficients(on_axis, np.zeros(2), 2 * qmax + 1, radius, nodes)
    return [box[q + 1, q] for q in range(qmax + 1)]


@dataclass(frozen=True)
class AxisDiagnostic:
    covered: bool
    missing: tuple
    off_pattern: float

    @property
    def verdict(self) -> str:
        return "shift" if self.covered else "inconclusive"


def axis_diagnostic(params: KernelParams, i: int, qmax: int, coeffs=None, atol=1e-8) -> AxisDiagnostic:
    """Check that every link ``theta -> theta + e_i`` of every chain is seen by some ``c(q)``.

    The link sits at row ``theta``, column ``theta + e_i``. ``off_pattern`` is
    the largest entry of any ``c(q)`` away from the links; it should vanish.
    """
    coeffs = axis_coefficients(params, i, qmax) if coeffs is None else coeffs
    fam = params.family
    e = mi.unit(params.n, i)
    mask = np.zeros((fam.r, fam.r), dtype=bool)
    missing = []
    for chain in fam.chains(i):
        for theta in chain[:-1]:
            row, col = fam.index(theta), fam.index(mi.add(theta, e))
            mask[row, col] = True
            if not any(abs(c[row, col]) > atol for c in coeffs):
                missing.append(theta)
    off = max(float(np.max(np.abs(np.where(mask, 0, c)))) for c in coeffs)
    return AxisDiagnostic(not missing, tuple(missing), off)


# ------------------------------------------------------------ inequivalence


@dataclass(frozen=True)
class InequivalenceWitness:
    theta: tuple
    i: int
    j: int

    def to_json(self) -> dict:
        return {"theta": list(self.theta), "i": self.i, "j": self.j}


def inequivalence_witness(alpha) -> InequivalenceWitness:
    """``theta`` with ``theta - e_i + e_j`` in the family but ``theta + e_j`` not, for ``i != j``."""
    alpha = mi.as_multiindex(alpha)
    n, d = len(alpha), sum(alpha)
    if n < 2:
        raise NoWitnessError("a mixed witness needs at least two coordinates")
    if d == 0:
        raise NoWitnessError("the family of alpha = 0 has one member; no witness exists")
    if alpha == mi.unit(n, 0):
        raise NoWitnessError("alpha = e_1 is excluded")
    fam = mi.index_family(alpha)
    if alpha[1:] == (0,) * (n - 1):
        theta, j = mi.sub(alpha, mi.unit(n, 0)), 1
    else:
        theta = (d,) + (0,) * (n - 1)
        j = next(k for k in range(1, n) if alpha[k] >= 1)
    w = InequivalenceWitness(theta, 0, j)
    if not witness_holds(fam, w):
        raise NoWitnessError(f"membership conditions fail for {w}")
    return w


def witness_holds(family, w: InequivalenceWitness) -> bool:
    n = family.n
    ei, ej = mi.unit(n, w.i), mi.unit(n, w.j)
    if w.theta not in family or w.theta[w.i] < 1:
        return False
    return mi.add(mi.sub(w.theta, ei), ej) in family and mi.add(w.theta, ej) not in family


def witness_entry(params: KernelParams, w: InequivalenceWitness) -> tuple:
    """``(closed-form entry, predicted value)`` of ``K_ij(0)`` at row ``theta - e_i + e_j``, column ``theta``."""
    fam, b = params.family, params.b
    th, i, j = w.theta, w.i, w.j
    low = mi.sub(th, mi.unit(params.n, i))
    row = mi.add(low, mi.unit(params.n, j))
    mat = curvature_closed(params, i, j).matrix
    entry = mat[fam.index(row), fam.index(th)]
    predicted = th[i] * (th[j] + 1) * b[fam.index(low)] / np.sqrt(b[fam.index(th)] * b[fam.index(row)])
    return complex(entry), float(predicted)


def witness_scan(max_n=4, max_degree=4, workers=None) -> list:
    """Witness for every ``alpha`` with ``2 <= n <= max_n``, ``1 <= |alpha| <= max_degree``, ``alpha != e_1``.

    Returns ``(alpha, witness, holds)`` triples.
    """
    alphas = [
        a
        for n in range(2, max_n + 1)
        for a in itertools.product(range(max_degree + 1), repeat=n)
        if 1 <= sum(a) <= max_degree and a != mi.unit(n, 0)
    ]

    def one(a):
        w = inequivalence_witness(a)
        return a, w, witness_holds(mi.index_family(a), w)

    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(one, alphas))


# ------------------------------------------------------------ classification


def classify_pair(p1: KernelParams, p2: KernelParams, tol=SAME_TOL) -> ClassificationVerdict:
    """Equivalent iff the recovered lambdas and the diagonals of ``K(0, 0)`` agree.

    ``mu`` is 1 at the zero index, which fixes the scalar gauge at the origin,
    so ``B`` can be compared directly.
    """
    if p1.alpha != p2.alpha:
        raise IncomparableError(f"different index structure: alpha {p1.alpha} vs {p2.alpha}")
    for i in range(p1.n):
        t1, t2 = curvature_closed(p1, i, i).trace, curvature_closed(p2, i, i).trace
        if abs(t1 - t2) > tol * max(1.0, abs(t1)):
            return ClassificationVerdict(False, {"kind": "trace", "coordinate": i, "values": [t1, t2]})
    for theta, b1, b2 in zip(p1.family, p1.b, p2.b):
        if abs(b1 - b2) > tol * max(1.0, abs(b1)):
            return ClassificationVerdict(
                False, {"kind": "B", "index": mi.format_multiindex(theta), "values": [float(b1), float(b2)]}
            )
    return ClassificationVerdict(True, None)
