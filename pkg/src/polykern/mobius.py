"""Disc automorphisms with a lifted rotation angle.

A factor ``(a, t)`` stands for ``w -> e^{it} (w - a) / (1 - conj(a) w)``; the
angle ``t`` is kept as an unreduced real so that the pair names a point of
the universal cover. Powers of the derivative are

    g'(w)^s := e^{ist} * ((1 - |a|^2) / (1 - conj(a) w)^2) ** s

with the principal branch; the fraction never meets the closed negative
real axis on the disc, so this is single valued and multiplicative in ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import multiindex as mi
from .errors import ContinuationError, DimensionError, DomainError


@dataclass(frozen=True)
class LiftedMobiusFactor:
    a: complex = 0j
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "t", float(self.t))
        if not abs(self.a) < 1:
            raise DomainError(f"|a| must be < 1, got {abs(self.a)}")

    def __call__(self, w):
        a = self.a
        return np.exp(1j * self.t) * (w - a) / (1 - np.conj(a) * w)

    def inverse_map(self, y):
        """Plain (unlifted) inverse map of the automorphism."""
        a = self.a
        u = np.exp(-1j * self.t) * y
        return (u + a) / (1 + np.conj(a) * u)

    def derivative(self, w):
        a = self.a
        return np.exp(1j * self.t) * (1 - abs(a) ** 2) / (1 - np.conj(a) * w) ** 2

    def second_derivative(self, w):
        a = self.a
        return np.exp(1j * self.t) * 2 * np.conj(a) * (1 - abs(a) ** 2) / (1 - np.conj(a) * w) ** 3

    def derivative_power(self, w, s):
        return derivative_power(self, w, s)

    @property
    def schwarz_constant(self) -> complex:
        return schwarz_constant(self)


def derivative_power(g: LiftedMobiusFactor, w, s):
    w = np.asarray(w, dtype=complex)
    frac = (1 - abs(g.a) ** 2) / (1 - np.conj(g.a) * w) ** 2
    return np.exp(1j * s * g.t) * frac**s


def schwarz_constant(g: LiftedMobiusFactor) -> complex:
    """The constant c with g'' = -2 c (g')^{3/2} on the disc."""
    return complex(-np.exp(-0.5j * g.t) * np.conj(g.a) / math.sqrt(1 - abs(g.a) ** 2))


@dataclass(frozen=True)
class LiftedMobiusTuple:
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def n(self) -> int:
        return len(self.factors)

    def __len__(self):
        return len(self.factors)

    def __getitem__(self, i) -> LiftedMobiusFactor:
        return self.factors[i]

    def __iter__(self):
        return iter(self.factors)

    @classmethod
    def identity(cls, n: int) -> "LiftedMobiusTuple":
        return cls(tuple(LiftedMobiusFactor() for _ in range(n)))

    @classmethod
    def from_arrays(cls, a, t=None) -> "LiftedMobiusTuple":
        a = np.atleast_1d(np.asarray(a, dtype=complex))
        t = np.zeros(a.shape) if t is None else np.atleast_1d(np.asarray(t, dtype=float))
        return cls(tuple(LiftedMobiusFactor(ai, ti) for ai, ti in zip(a, t)))

    @classmethod
    def phi(cls, z) -> "LiftedMobiusTuple":
        """The involution-like family ``w -> (w - z_i) / (1 - conj(z_i) w)`` with zero lift."""
        return cls.from_arrays(z)

    @classmethod
    def random(cls, rng, n: int, radius: float = 0.7, angle: float = math.pi) -> "LiftedMobiusTuple":
        rad = radius * np.sqrt(rng.uniform(0, 1, n))
        arg = rng.uniform(0, 2 * math.pi, n)
        return cls.from_arrays(rad * np.exp(1j * arg), rng.uniform(-angle, angle, n))

    def to_json(self) -> list:
        return [{"a_re": f.a.real, "a_im": f.a.imag, "t": f.t} for f in self.factors]

    @classmethod
    def from_json(cls, data) -> "LiftedMobiusTuple":
        return cls(tuple(LiftedMobiusFactor(complex(d["a_re"], d["a_im"]), d["t"]) for d in data))


def act(g: LiftedMobiusTuple, z):
    """Apply ``g`` componentwise to points ``z`` of shape (..., n)."""
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != g.n:
        raise DimensionError(f"point has {z.shape[-1]} coordinates, tuple has {g.n}")
    return np.stack([f(z[..., i]) for i, f in enumerate(g.factors)], axis=-1)


def _wrap(x: float) -> float:
    return (x + math.pi) % (2 * math.pi) - math.pi


def _compose_factor(f1: LiftedMobiusFactor, f2: LiftedMobiusFactor, steps: int) -> LiftedMobiusFactor:
    # Track the lift of (s*a1, s*t1) o f2 as s runs from 0 to 1; at s=0 it is f2 itself.
    t = f2.t
    a_h = f2.a
    for s in np.linspace(0.0, 1.0, steps + 1)[1:]:
        fs = LiftedMobiusFactor(s * f1.a, s * f1.t)
        a_h = f2.inverse_map(fs.a)
        rot = fs.derivative(fs.a) * f2.derivative(a_h) * (1 - abs(a_h) ** 2)
        jump = _wrap(float(np.angle(rot)) - t)
        if abs(jump) > math.pi / 2:
            raise ContinuationError(f"angle jump {jump:.3f} exceeds pi/2; use more than {steps} steps")
        t += jump
    return LiftedMobiusFactor(complex(a_h), t)


def compose_lifted(g1: LiftedMobiusTuple, g2: LiftedMobiusTuple, steps: int = 64) -> LiftedMobiusTuple:
    """Lifted product ``g1 g2`` (acting as ``g1 o g2``) by winding continuation."""
    if steps < 8:
        raise DomainError("steps must be >= 8")
    if g1.n != g2.n:
        raise DimensionError(f"tuple sizes differ: {g1.n} vs {g2.n}")
    return LiftedMobiusTuple(tuple(_compose_factor(f1, f2, steps) for f1, f2 in zip(g1, g2)))


def cocycle_eval(g: LiftedMobiusTuple, z, params):
    """The multiplier J(g, z) of the family, shape z.shape[:-1] + (r, r)."""
    z = np.asarray(z, dtype=complex)
    fam = params.family
    lam = params.lam
    c = [schwarz_constant(f) for f in g.factors]
    out = np.zeros(z.shape[:-1] + (fam.r, fam.r), dtype=complex)
    for p, theta in enumerate(fam.members):
        for q, eta in enumerate(fam.members):
            if not mi.leq(eta, theta):
                continue
            entry = mi.multi_binomial(theta, eta) * np.ones(z.shape[:-1], dtype=complex)
            for i, f in enumerate(g.factors):
                k = theta[i] - eta[i]
                entry = entry * (-c[i]) ** k * derivative_power(f, z[..., i], (lam[i] + theta[i] + eta[i]) / 2)
            out[..., p, q] = entry
    return out


def cocycle_factored(z, params):
    """J(phi_z, z) from the product of a scalar, a diagonal and a shift exponential."""
    from ._linalg import nilpotent_exp, weighted_sum

    z = np.asarray(z, dtype=complex)
    fam = params.family
    mod2 = np.abs(z) ** 2
    scalar = np.prod((1 - mod2) ** (-np.asarray(params.lam) / 2), axis=-1)
    D = mi.diagonal_matrix(mod2, fam)
    E = nilpotent_exp(weighted_sum(np.conj(z), params.shifts), params.nil_order)
    return scalar[..., None, None] * (D @ E)
