"""Spectral decompositions and moments of Haar-conjugated diagonal matrices.

For A = Q diag(v) Q^H with Q Haar-unitary of size K, the second moments of
the entries of A depend only on the vector v:

    E{ (A)_kk^2 }   = mu(v) = ((sum v)^2 + sum v^2) / (K (K+1))
    E{ |(A)_kj|^2 } = nu(v) = sum v^2 / ((K-1)(K+1))
                              - (sum v)^2 / ((K-1) K (K+1)),  k != j

and satisfy mu(v) + (K-1) nu(v) = sum(v^2) / K exactly.  These moments
split the received power into a desired part and an interference part for
the regularized zero-forcing designs.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "svd_backward",
    "eig_gram",
    "mu",
    "nu",
    "lemma3_maximizer",
    "haar_unitary",
]


def svd_backward(H_hat: np.ndarray):
    """Decompose an N x M estimated backward channel, N <= M.

    Returns (U, theta, V) with U (N x N) and V (M x M) unitary,
    theta the N squared singular values in descending order, and
    H_hat = U [diag(sqrt(theta)) | 0] V^H.
    """
    H_hat = np.asarray(H_hat)
    N, M = H_hat.shape
    if N > M:
        raise ValueError(f"svd_backward expects N <= M, got {N} x {M}")
    if not np.all(np.isfinite(H_hat)):
        raise ValueError("svd_backward: input has non-finite entries")
    U, s, Vh = np.linalg.svd(H_hat, full_matrices=True)
    return U, s * s, Vh.conj().T


def eig_gram(G_hat: np.ndarray):
    """Hermitian eigendecomposition of G_hat G_hat^H.

    Returns (Q, lam) with Q unitary and lam the eigenvalues in descending
    order.  Tiny negative eigenvalues from rounding (within -1e-12 of zero,
    relative to the largest) are clamped to 0.
    """
    G_hat = np.asarray(G_hat)
    if not np.all(np.isfinite(G_hat)):
        raise ValueError("eig_gram: input has non-finite entries")
    gram = G_hat @ G_hat.conj().T
    lam, Q = np.linalg.eigh(gram)
    lam = lam[::-1]
    Q = Q[:, ::-1]
    floor = -1e-12 * max(1.0, float(lam[0])) if lam.size else 0.0
    if lam.size and lam[-1] < floor:
        raise ValueError(f"eig_gram: eigenvalue {lam[-1]} below rounding floor")
    return Q, np.maximum(lam, 0.0)


def mu(vals) -> float:
    """Expected squared diagonal entry of Q diag(vals) Q^H over Haar Q."""
    v = np.asarray(vals, dtype=float)
    K = v.size
    if K < 1:
        raise ValueError("mu needs at least one value")
    s1 = v.sum()
    return float((s1 * s1 + (v * v).sum()) / (K * (K + 1)))


def nu(vals) -> float:
    """Expected squared off-diagonal magnitude of Q diag(vals) Q^H over Haar Q."""
    v = np.asarray(vals, dtype=float)
    K = v.size
    if K < 2:
        raise ValueError("nu needs at least two values")
    s1 = v.sum()
    s2 = (v * v).sum()
    return float(s2 / ((K - 1) * (K + 1)) - s1 * s1 / ((K - 1) * K * (K + 1)))


def lemma3_maximizer(C: float, D: float) -> float:
    """Maximizing regularizer C / D of the large-K SINR profile.

    The profile, with S1 = sum v/(v+a), S2 = sum v/(v+a)^2,
    S3 = sum v^2/(v+a)^2, is

        SINR(a) = (A*S1^2 + B*S3) / (C*S2 + D*S3 + E*S1^2)

    whose large-K maximizer is a = C/D.
    """
    if not D > 0:
        raise ValueError(f"lemma3_maximizer needs D > 0, got {D!r}")
    if C < 0:
        raise ValueError(f"lemma3_maximizer needs C >= 0, got {C!r}")
    return C / D


def haar_unitary(n: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Sample Haar-distributed n x n unitaries (a batch of them if size given).

    QR of a complex Ginibre matrix, with the R-diagonal phases pushed into Q
    so the distribution is exactly Haar.
    """
    shape = (n, n) if size is None else (size, n, n)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)
    Q, R = np.linalg.qr(z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    Q = Q * (d / np.abs(d))[..., None, :]
    return Q
