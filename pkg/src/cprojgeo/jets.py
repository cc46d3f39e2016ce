r"""Truncated-Taylor (jet) arithmetic on chart coordinates.

A :class:`Jet` of order ``k`` stores the raw partial-derivative tensors of an
array-valued function at a batch of points,

    coeffs[j][..., comp, i_1, ..., i_j] = d^j f_comp / dx^{i_1} ... dx^{i_j},

symmetric in the trailing ``j`` derivative axes.  Products use the Leibniz
rule in subset form (no multinomial weights are needed for raw partials),
scalar functions compose through their univariate Taylor series, and small
matrix inverses are obtained by Newton iteration, which terminates exactly
because the derivative part of a jet is nilpotent.

All operations broadcast over leading batch axes, so a single call evaluates
a field on a whole grid chunk.  Derivatives are exact to roundoff for fields
built from jet arithmetic; finite differences are used in the test-suite only
as an independent cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Jet",
    "Jet2",
    "coordinate_jet",
    "const_jet",
    "jet_einsum",
    "jet_compose",
    "jet_reciprocal",
    "jet_power",
    "jet_sqrt",
    "jet_log",
    "jet_exp",
    "jet_matinv",
    "jet_det",
    "jet_stack",
]

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


class Jet:
    """Order-``k`` truncated Taylor expansion of an array-valued function.

    Parameters
    ----------
    n : int
        Number of chart coordinates (derivative directions).
    order : int
        Highest derivative order carried.
    cshape : tuple
        Component shape of the underlying array value.  Leading axes of the
        coefficient arrays beyond ``cshape`` are batch axes.
    coeffs : list of ndarray
        ``coeffs[j]`` has shape ``batch + cshape + (n,)*j``.
    """

    __slots__ = ("n", "order", "cshape", "coeffs")

    def __init__(self, n, order, cshape, coeffs):
        self.n = int(n)
        self.order = int(order)
        self.cshape = tuple(cshape)
        self.coeffs = list(coeffs)

    @property
    def value(self):
        return self.coeffs[0]

    def d(self, j):
        """Raw order-``j`` partial derivative tensor."""
        return self.coeffs[j]

    @property
    def batch_shape(self):
        nb = self.coeffs[0].ndim - len(self.cshape)
        return self.coeffs[0].shape[:nb]

    def comp(self, idx):
        """Extract one component as a scalar jet."""
        if not isinstance(idx, tuple):
            idx = (idx,)
        sel = (Ellipsis,) + idx
        out = []
        for j, c in enumerate(self.coeffs):
            if j == 0:
                out.append(c[sel])
            else:
                out.append(c[sel + (slice(None),) * j])
        return Jet(self.n, self.order, (), out)

    def truncated(self, order):
        if order >= self.order:
            return self
        return Jet(self.n, order, self.cshape, self.coeffs[: order + 1])

    def astype(self, dtype):
        return Jet(self.n, self.order, self.cshape, [c.astype(dtype) for c in self.coeffs])

    def conj(self):
        return Jet(self.n, self.order, self.cshape, [np.conj(c) for c in self.coeffs])

    def real(self):
        return Jet(self.n, self.order, self.cshape, [np.real(c) for c in self.coeffs])

    def imag(self):
        return Jet(self.n, self.order, self.cshape, [np.imag(c) for c in self.coeffs])

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            k = min(self.order, other.order)
            return Jet(self.n, k, self.cshape,
                       [self.coeffs[j] + other.coeffs[j] for j in range(k + 1)])
        out = [c.copy() for c in self.coeffs]
        out[0] = out[0] + other
        return Jet(self.n, self.order, self.cshape, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.n, self.order, self.cshape, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            if self.cshape == () or other.cshape == ():
                a, b = (self, other) if self.cshape == () else (other, self)
                lab = _LETTERS[: len(b.cshape)]
                return jet_einsum(f"...,...{lab}->...{lab}", a, b)
            if self.cshape == other.cshape:
                lab = _LETTERS[: len(self.cshape)]
                return jet_einsum(f"...{lab},...{lab}->...{lab}", self, other)
            raise ValueError("ambiguous jet product; use jet_einsum")
        return Jet(self.n, self.order, self.cshape, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            if other.cshape != ():
                raise ValueError("jet division only by scalar jets")
            return self * jet_reciprocal(other)
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return jet_reciprocal(self) * other


@dataclass(frozen=True)
class Jet2:
    """Order-2 jet view: value, gradient, symmetric Hessian."""

    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    @staticmethod
    def from_jet(j):
        if j.order < 2:
            raise ValueError("need a jet of order >= 2")
        return Jet2(j.coeffs[0], j.coeffs[1], j.coeffs[2])


def coordinate_jet(x, order):
    """Jet of the identity chart map at points ``x`` of shape (..., n)."""
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    batch = x.shape[:-1]
    coeffs = [x]
    if order >= 1:
        e = np.broadcast_to(np.eye(n), batch + (n, n)).copy()
        coeffs.append(e)
    for j in range(2, order + 1):
        coeffs.append(np.zeros(batch + (n,) * (j + 1)))
    return Jet(n, order, (n,), coeffs)


def const_jet(arr, n, order, batch_shape=()):
    """Jet of a constant (all derivatives zero)."""
    arr = np.asarray(arr)
    val = np.broadcast_to(arr, batch_shape + arr.shape).copy() if batch_shape else arr
    coeffs = [val]
    for j in range(1, order + 1):
        coeffs.append(np.zeros(val.shape + (n,) * j, dtype=arr.dtype))
    return Jet(n, order, arr.shape, coeffs)


def _riffle_sum(arr, i, j):
    """Sum over placements of the first ``i`` of ``i+j`` trailing derivative
    axes into all sorted position subsets, symmetrizing a Leibniz term."""
    r = i + j
    if i == 0 or j == 0:
        return arr
    nd = arr.ndim
    base = nd - r
    out = None
    for subset in itertools.combinations(range(r), i):
        comp = [p for p in range(r) if p not in subset]
        perm = list(range(base)) + [0] * r
        for t, p in enumerate(subset):
            perm[base + p] = base + t
        for t, p in enumerate(comp):
            perm[base + p] = base + i + t
        term = np.transpose(arr, perm)
        out = term if out is None else out + term
    return out


def jet_einsum(subscripts, a, b):
    """Contract two jets with an einsum over component axes.

    ``subscripts`` uses an explicit ellipsis for batch axes and letters for
    component axes only, e.g. ``'...cab,...b->...ca'``.  Derivative axes are
    handled internally by the Leibniz rule with riffle symmetrization.
    """
    ins, out = subscripts.split("->")
    sa, sb = ins.split(",")
    used = set(subscripts) - {".", ",", ">", "-"}
    pool = [c for c in _LETTERS if c not in used]
    order = min(a.order, b.order)
    n = a.n
    coeffs = []
    for r in range(order + 1):
        acc = None
        for i in range(r + 1):
            j = r - i
            la = "".join(pool[:i])
            lb = "".join(pool[i:i + j])
            ein = f"{sa}{la},{sb}{lb}->{out}{la}{lb}"
            term = np.einsum(ein, a.coeffs[i], b.coeffs[j])
            term = _riffle_sum(term, i, j)
            acc = term if acc is None else acc + term
        coeffs.append(acc)
    cshape = coeffs[0].shape[len(np.broadcast_shapes(a.batch_shape, b.batch_shape)):]
    return Jet(n, order, cshape, coeffs)


def jet_compose(u, series):
    """Compose a scalar jet with a univariate function given by its Taylor
    coefficients ``series[s] = f^(s)(u.value)/s!`` (arrays over the batch)."""
    if u.cshape != ():
        raise ValueError("composition needs a scalar jet")
    k = u.order
    delta = Jet(u.n, k, (), [np.zeros_like(u.coeffs[0])] + [c for c in u.coeffs[1:]])
    dt = np.result_type(*(np.asarray(series[s]).dtype for s in range(k + 1)))
    acc = Jet(u.n, k, (), [np.broadcast_to(np.asarray(series[k], dtype=dt),
                                           u.coeffs[0].shape).copy()]
              + [np.zeros(u.coeffs[0].shape + (u.n,) * j, dtype=dt)
                 for j in range(1, k + 1)])
    for s in range(k - 1, -1, -1):
        acc = acc * delta
        acc.coeffs[0] = acc.coeffs[0] + series[s]
    return acc


def _compose_scaled(u, coef_fn):
    v = u.coeffs[0]
    series = [coef_fn(s, v) for s in range(u.order + 1)]
    return jet_compose(u, series)


def jet_reciprocal(u):
    return _compose_scaled(u, lambda s, v: (-1.0) ** s * v ** (-(s + 1)))


def jet_power(u, alpha):
    """u**alpha for a scalar jet with nonvanishing value (real powers)."""
    def coef(s, v):
        c = 1.0
        for t in range(s):
            c *= (alpha - t)
        return c / math.factorial(s) * v ** (alpha - s)
    return _compose_scaled(u, coef)


def jet_sqrt(u):
    return jet_power(u, 0.5)


def jet_log(u):
    def coef(s, v):
        if s == 0:
            return np.log(v)
        return (-1.0) ** (s - 1) / s * v ** (-s)
    return _compose_scaled(u, coef)


def jet_exp(u):
    def coef(s, v):
        return np.exp(v) / math.factorial(s)
    return _compose_scaled(u, coef)


def jet_matinv(a):
    """Inverse of a square-matrix jet by Newton iteration.

    Exact after ceil(log2(order+1)) + 1 steps since corrections are nilpotent.
    """
    if len(a.cshape) != 2 or a.cshape[0] != a.cshape[1]:
        raise ValueError("jet_matinv needs a square matrix jet")
    x0 = np.linalg.inv(a.coeffs[0])
    x = const_jet(np.eye(a.cshape[0]), a.n, a.order)
    x = Jet(a.n, a.order, a.cshape,
            [x0] + [np.zeros(x0.shape + (a.n,) * j, dtype=x0.dtype)
                    for j in range(1, a.order + 1)])
    steps = max(1, math.ceil(math.log2(a.order + 1)) + 1)
    eye = np.eye(a.cshape[0])
    for _ in range(steps):
        ax = jet_einsum("...ij,...jk->...ik", a, x)
        two_m = Jet(ax.n, ax.order, ax.cshape,
                    [2.0 * eye - ax.coeffs[0]] + [-c for c in ax.coeffs[1:]])
        x = jet_einsum("...ij,...jk->...ik", x, two_m)
    return x


def jet_det(a):
    """Determinant of a small square-matrix jet by permutation expansion."""
    k = a.cshape[0]
    if a.cshape != (k, k):
        raise ValueError("jet_det needs a square matrix jet")
    acc = None
    for perm in itertools.permutations(range(k)):
        sign = 1.0
        seen = list(perm)
        for i in range(k):
            while seen[i] != i:
                j = seen[i]
                seen[i], seen[j] = seen[j], seen[i]
                sign = -sign
        term = a.comp((0, perm[0]))
        for row in range(1, k):
            term = term * a.comp((row, perm[row]))
        term = term * sign
        acc = term if acc is None else acc + term
    return acc


def jet_stack(jets, shape):
    """Assemble scalar jets (row-major over ``shape``) into one array jet."""
    j0 = jets[0]
    batch = j0.coeffs[0].shape
    coeffs = []
    for r in range(j0.order + 1):
        arrs = np.stack([np.broadcast_to(j.coeffs[r], batch + (j0.n,) * r)
                         for j in jets], axis=0)
        arrs = np.moveaxis(arrs, 0, len(batch))
        coeffs.append(arrs.reshape(batch + tuple(shape) + (j0.n,) * r))
    return Jet(j0.n, j0.order, tuple(shape), coeffs)
