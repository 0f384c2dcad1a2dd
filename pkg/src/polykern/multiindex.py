"""Multi-index combinatorics on the graded co-lexicographic order.

Multi-indices are plain tuples of non-negative ints. Coordinates are
zero-based throughout the package: ``shift_matrix(0, fam)`` is the shift in
the first variable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionError, DomainError, SingularityError

MultiIndex = tuple


def as_multiindex(beta) -> tuple:
    beta = tuple(int(b) for b in beta)
    if any(b < 0 for b in beta):
        raise DomainError(f"multi-index entries must be >= 0, got {beta}")
    return beta


def parse_multiindex(text: str) -> tuple:
    """Parse ``"2,0,1"`` into ``(2, 0, 1)``."""
    parts = [p for p in text.replace(" ", "").split(",") if p != ""]
    if not parts:
        raise DomainError(f"empty multi-index string {text!r}")
    return as_multiindex(int(p) for p in parts)


def format_multiindex(beta) -> str:
    return ",".join(str(b) for b in beta)


def unit(n: int, i: int) -> tuple:
    e = [0] * n
    e[i] = 1
    return tuple(e)


def add(beta, gamma) -> tuple:
    return tuple(b + g for b, g in zip(beta, gamma))


def sub(beta, gamma) -> tuple:
    return tuple(b - g for b, g in zip(beta, gamma))


def leq(beta, gamma) -> bool:
    """Entrywise partial order."""
    return all(b <= g for b, g in zip(beta, gamma))


def colex_key(beta) -> tuple:
    # degree first, then the last coordinate is the most significant
    return (sum(beta), tuple(reversed(beta)))


def graded_colex_compare(beta, gamma) -> int:
    """Return -1, 0 or 1 as ``beta`` is less than, equal to or greater than ``gamma``.

    Total degree decides first; on ties the last coordinate where the two
    differ decides, the smaller entry giving the smaller index.
    """
    if len(beta) != len(gamma):
        raise DimensionError(f"length mismatch: {len(beta)} vs {len(gamma)}")
    kb, kg = colex_key(beta), colex_key(gamma)
    return (kb > kg) - (kb < kg)


@dataclass(frozen=True)
class IndexFamily:
    """The ordered set of multi-indices below ``alpha`` in graded co-lex order."""

    alpha: tuple
    members: tuple = field(repr=False)
    positions: dict = field(repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def r(self) -> int:
        return len(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.members)

    def __contains__(self, beta) -> bool:
        return tuple(beta) in self.positions

    def index(self, beta) -> int:
        return self.positions[tuple(beta)]

    def degrees(self, i: int) -> np.ndarray:
        """Array of the ``i``-th entries of the members, in family order."""
        return np.array([m[i] for m in self.members], dtype=float)

    def chains(self, i: int) -> list:
        """Maximal chains ``theta, theta+e_i, ...`` inside the family, one per ``theta`` with ``theta_i = 0``."""
        e = unit(self.n, i)
        out = []
        for theta in self.members:
            if theta[i] != 0:
                continue
            chain = [theta]
            while add(chain[-1], e) in self.positions:
                chain.append(add(chain[-1], e))
            out.append(chain)
        return out


def index_family(alpha) -> IndexFamily:
    alpha = as_multiindex(alpha)
    n, d = len(alpha), sum(alpha)
    key_alpha = colex_key(alpha)
    members = [
        beta
        for beta in itertools.product(range(d + 1), repeat=n)
        if sum(beta) <= d and colex_key(beta) <= key_alpha
    ]
    members.sort(key=colex_key)
    members = tuple(members)
    return IndexFamily(alpha, members, {m: k for k, m in enumerate(members)})


def multi_binomial(gamma, beta) -> int:
    if len(gamma) != len(beta):
        raise DimensionError(f"length mismatch: {len(gamma)} vs {len(beta)}")
    return math.prod(math.comb(g, b) if g >= b else 0 for g, b in zip(gamma, beta))


def multi_factorial(m) -> int:
    return math.prod(math.factorial(k) for k in m)


def pochhammer(x: float, k: int) -> float:
    """Rising factorial ``x (x+1) ... (x+k-1)``."""
    if k < 0:
        raise DomainError(f"negative Pochhammer length {k}")
    out = 1.0
    for j in range(k):
        out *= x + j
    return out


def multi_pochhammer(x: Sequence[float], m) -> float:
    if len(x) != len(m):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(m)}")
    return math.prod(pochhammer(xi, mi) for xi, mi in zip(x, m))


def shift_matrix(i: int, family: IndexFamily) -> np.ndarray:
    """Truncated weighted shift ``e_theta -> (theta_i + 1) e_{theta + e_i}``.

    Columns whose target leaves the family are zero.
    """
    if not 0 <= i < family.n:
        raise DimensionError(f"coordinate {i} out of range for n={family.n}")
    S = np.zeros((family.r, family.r))
    e = unit(family.n, i)
    for col, theta in enumerate(family.members):
        target = add(theta, e)
        if target in family.positions:
            S[family.positions[target], col] = theta[i] + 1
    return S


def diagonal_matrix(u, family: IndexFamily) -> np.ndarray:
    """Diagonal matrix with ``theta``-entry ``prod_i (1 - u_i)^(-theta_i)``.

    ``u`` may carry leading batch axes; the result then has shape ``u.shape[:-1] + (r, r)``.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape[-1] != family.n:
        raise DimensionError(f"expected {family.n} coordinates, got {u.shape[-1]}")
    base = 1.0 - u
    if np.any(base == 0):
        raise SingularityError("diagonal_matrix: some u_i equals 1")
    powers = np.array(family.members, dtype=float)  # (r, n)
    diag = np.prod(base[..., None, :] ** (-powers), axis=-1)
    out = np.zeros(u.shape[:-1] + (family.r, family.r), dtype=complex)
    idx = np.arange(family.r)
    out[..., idx, idx] = diag
    return out
