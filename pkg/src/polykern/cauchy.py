"""Taylor coefficients of holomorphic maps by trapezoid-rule Cauchy integrals.

Evaluators take an array of points of shape ``(..., m)`` and return an array
of shape ``(...,) + value_shape``. The rule is spectrally accurate: for a
poly-circle of radius ``rho`` inside a polydisc of holomorphy of radius
``R``, the aliasing error decays like ``(rho / R) ** nodes``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, GeometryError


def _check_geometry(center, radius, domain_radius):
    if radius <= 0:
        raise GeometryError(f"radius must be positive, got {radius}")
    if domain_radius is not None and np.any(np.abs(center) + radius >= domain_radius):
        raise GeometryError(
            f"poly-circle of radius {radius} about {center} leaves the polydisc of radius {domain_radius}"
        )


def _dft_matrix(nodes, order):
    k = np.arange(nodes)[:, None]
    p = np.arange(order + 1)[None, :]
    return np.exp(-2j * np.pi * k * p / nodes) / nodes


def cauchy_coefficients(f, center, order, radius=0.4, nodes=64, domain_radius=1.0):
    """Taylor coefficients ``c_p`` of ``f`` about ``center`` for every ``p`` in the box ``[0, order]^m``.

    Returns an array of shape ``(order+1,)*m + value_shape``. The grid is
    streamed one node of the first axis at a time, so memory stays at
    ``nodes**(m-1)`` evaluations.
    """
    center = np.atleast_1d(np.asarray(center, dtype=complex))
    m = center.shape[0]
    if nodes <= order:
        raise DomainError(f"need nodes > order, got nodes={nodes}, order={order}")
    _check_geometry(center, radius, domain_radius)
    circle = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    W = _dft_matrix(nodes, order)

    if m == 1:
        vals = np.asarray(f(center + circle[:, None]))
        coef = np.tensordot(W, vals, axes=([0], [0]))
    else:
        rest = np.meshgrid(*([circle] * (m - 1)), indexing="ij")
        rest = np.stack(rest, axis=-1) + center[1:]
        coef = None
        for k0 in range(nodes):
            first = np.full(rest.shape[:-1] + (1,), center[0] + circle[k0])
            vals = np.asarray(f(np.concatenate([first, rest], axis=-1)))
            for _ in range(m - 1):
                vals = np.moveaxis(np.tensordot(vals, W, axes=([0], [0])), -1, m - 2)
            term = W[k0].reshape((-1,) + (1,) * vals.ndim) * vals[None]
            coef = term if coef is None else coef + term
    degree = np.indices((order + 1,) * m).sum(axis=0)
    scale = radius ** (-degree.astype(float))
    return coef * scale.reshape(scale.shape + (1,) * (coef.ndim - m))


def cauchy_derivative_oracle(f, z, a, radius=0.4, nodes=64, domain_radius=1.0):
    """``d^a f(z)`` as ``a!`` times a Cauchy coefficient.

    Only coordinates with ``a_k > 0`` are integrated over; in the others the
    mean-value property lets us evaluate at the centre.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a = tuple(int(x) for x in a)
    if len(a) != z.shape[0]:
        raise DomainError(f"multi-index length {len(a)} does not match point dimension {z.shape[0]}")
    if nodes < 16:
        raise DomainError("nodes must be >= 16")
    active = [k for k, ak in enumerate(a) if ak > 0]
    if not active:
        return np.asarray(f(z[None, :]))[0]
    _check_geometry(z[active], radius, domain_radius)

    def restricted(u):
        pts = np.broadcast_to(z, u.shape[:-1] + z.shape).copy()
        pts[..., active] = u
        return f(pts)

    order = max(a[k] for k in active)
    coef = cauchy_coefficients(restricted, z[active], order, radius, nodes, domain_radius=None)
    sub = tuple(a[k] for k in active)
    return math.prod(math.factorial(x) for x in sub) * coef[sub]
