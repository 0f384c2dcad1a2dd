import numpy as np


def nilpotent_exp(X, order):
    """exp(X) for nilpotent X with X**(order+1) == 0, batched over leading axes."""
    X = np.asarray(X)
    out = np.broadcast_to(np.eye(X.shape[-1], dtype=X.dtype), X.shape).copy()
    term = out.copy()
    for k in range(1, order + 1):
        term = term @ X / k
        out = out + term
    return out


def weighted_sum(coeffs, mats):
    """sum_i coeffs[..., i] * mats[i] -> shape coeffs.shape[:-1] + mats.shape[1:]."""
    return np.einsum("...i,ijk->...jk", coeffs, np.asarray(mats))


def hermitian_power(A, p):
    w, V = np.linalg.eigh(A)
    return (V * w**p) @ V.conj().T


def relative_residual(A, B):
    """||A - B|| / max(||A||, ||B||, tiny), Frobenius norms over the trailing matrix axes."""
    A, B = np.asarray(A), np.asarray(B)
    diff = np.linalg.norm(A - B, axis=(-2, -1))
    scale = np.maximum(np.linalg.norm(A, axis=(-2, -1)), np.linalg.norm(B, axis=(-2, -1)))
    return diff / np.maximum(scale, np.finfo(float).tiny)
