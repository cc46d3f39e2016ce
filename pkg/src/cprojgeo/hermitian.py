r"""Conversions between real J-compatible tensors and complex Hermitian data.

Chart convention: real coordinates interleave real and imaginary parts,
``z^j = x^{2j} + i x^{2j+1}``, and the standard almost complex structure acts
as ``J e_{2j} = e_{2j+1}``, ``J e_{2j+1} = -e_{2j}``.

A complex Hermitian matrix ``Z`` (a form on covectors) realifies as

    T = 2 Re( Z^{jk} d/dz^j (x) d/dz-bar^k ),

and ``real_to_herm`` inverts this exactly:  ``Z^{jk} = T(dz^j, dz-bar^k)``.
The covariant pair (``herm_cov_to_real`` / ``real_cov_to_herm``) mirrors this
for forms on vectors.  These maps are the single source of truth for every
factor-of-two convention in the package; the model-parallelism tests pin them.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "standard_J",
    "to_complex_vector",
    "to_real_vector",
    "to_complex_covector",
    "to_real_covector",
    "herm_to_real",
    "real_to_herm",
    "herm_cov_to_real",
    "real_cov_to_herm",
    "hermitian_signature",
]


def standard_J(m):
    """Standard complex structure matrix J^a_b on R^{2m}, interleaved."""
    J = np.zeros((2 * m, 2 * m))
    for j in range(m):
        J[2 * j + 1, 2 * j] = 1.0
        J[2 * j, 2 * j + 1] = -1.0
    return J


def to_complex_vector(v):
    """dz-components of a real vector, v_c^j = v^{2j} + i v^{2j+1}."""
    v = np.asarray(v)
    return v[..., 0::2] + 1j * v[..., 1::2]


def to_real_vector(w):
    """Realify a complex vector: 2 Re(w^j d/dz^j), interleaved components."""
    w = np.asarray(w)
    out = np.empty(w.shape[:-1] + (2 * w.shape[-1],))
    out[..., 0::2] = np.real(w)
    out[..., 1::2] = np.imag(w)
    return out


def to_complex_covector(u):
    """(1,0)-components of a real covector, u_j = u(d/dz^j)."""
    u = np.asarray(u)
    return 0.5 * (u[..., 0::2] - 1j * u[..., 1::2])


def to_real_covector(uc):
    """Realify a complex covector: 2 Re(u_j dz^j)."""
    uc = np.asarray(uc)
    out = np.empty(uc.shape[:-1] + (2 * uc.shape[-1],))
    out[..., 0::2] = 2.0 * np.real(uc)
    out[..., 1::2] = -2.0 * np.imag(uc)
    return out


def _interleave_blocks(re, im, s00, s01, s10, s11):
    k = re.shape[-1]
    out = np.empty(re.shape[:-2] + (2 * k, 2 * k))
    out[..., 0::2, 0::2] = s00 * re
    out[..., 0::2, 1::2] = s01 * im
    out[..., 1::2, 0::2] = s10 * im
    out[..., 1::2, 1::2] = s11 * re
    return out


def herm_to_real(Z):
    """Real symmetric J-Hermitian (2,0)-tensor of a complex Hermitian matrix."""
    Z = np.asarray(Z)
    return _interleave_blocks(np.real(Z), np.imag(Z), 0.5, -0.5, 0.5, 0.5)


def real_to_herm(T):
    """Inverse of :func:`herm_to_real`; projects onto the Hermitian part."""
    T = np.asarray(T)
    re = T[..., 0::2, 0::2] + T[..., 1::2, 1::2]
    im = T[..., 1::2, 0::2] - T[..., 0::2, 1::2]
    return re + 1j * im


def herm_cov_to_real(P):
    """Real symmetric J-Hermitian (0,2)-tensor of a complex Hermitian matrix."""
    P = np.asarray(P)
    return _interleave_blocks(np.real(P), np.imag(P), 2.0, 2.0, -2.0, 2.0)


def real_cov_to_herm(T):
    """Inverse of :func:`herm_cov_to_real`."""
    T = np.asarray(T)
    re = T[..., 0::2, 0::2] + T[..., 1::2, 1::2]
    im = T[..., 0::2, 1::2] - T[..., 1::2, 0::2]
    return 0.25 * (re + 1j * im)


def hermitian_signature(Z, eps_rel=1e-9):
    """(p, q, r) eigenvalue-sign counts of Hermitian matrices, batched.

    Zero calls use a threshold relative to the spectral radius.
    """
    w = np.linalg.eigvalsh(Z)
    scale = np.max(np.abs(w), axis=-1, keepdims=True)
    scale = np.where(scale == 0.0, 1.0, scale)
    small = np.abs(w) <= eps_rel * scale
    p = np.sum((w > 0) & ~small, axis=-1)
    q = np.sum((w < 0) & ~small, axis=-1)
    r = np.sum(small, axis=-1)
    return p, q, r
