"""Chebyshev polynomials of the first and second kind.

Both families satisfy the same three-term recurrence

    P_k(x) = 2x P_{k-1}(x) - P_{k-2}(x),

differing only in their seeds: T_0 = 1, T_1 = x for the first kind and
U_0 = 1, U_1 = 2x for the second. Evaluation is always by the recurrence,
never by cos(n arccos x): the recurrence is numerically stable, is defined on
all of R (inputs can stray outside [-1, 1] before a layer's internal tanh),
and avoids arccos domain errors.

Reference values used throughout the tests: T_n(cos t) = cos(n t),
U_n(cos t) = sin((n+1) t) / sin t, roots of T_n at cos((2k+1)pi/(2n)), and
extrema of T_n at cos(k pi / n) where it alternates between +1 and -1.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import ndcore


class PolyKind(Enum):
    FIRST = "first"
    SECOND = "second"


@dataclass
class BasisTensor:
    """Per-sample, per-feature polynomial values: values[b, i, k] = P_k(x[b, i])."""

    values: np.ndarray  # [batch, in, degree + 1]
    degree: int
    kind: PolyKind


def _basis_stack(x, degree, kind):
    """P_0..P_degree of every element of x, stacked along a new last axis."""
    x = np.asarray(x, dtype=ndcore.real_dtype())
    out = np.empty(x.shape + (degree + 1,), dtype=x.dtype)
    out[..., 0] = 1.0
    if degree >= 1:
        out[..., 1] = x if kind is PolyKind.FIRST else 2.0 * x
        for k in range(2, degree + 1):
            out[..., k] = 2.0 * x * out[..., k - 1] - out[..., k - 2]
    return out


def _derivative_stack(x, degree, kind):
    """d/dx P_0..P_degree of every element of x, stacked along a new last axis.

    First kind uses the identity T'_k = k * U_{k-1}. Second kind uses the
    derivative recurrence U'_k = 2 U_{k-1} + 2x U'_{k-1} - U'_{k-2} with seeds
    U'_0 = 0, U'_1 = 2, which stays finite at x = +/-1 where the closed form
    has a 1/(1 - x^2) singularity.
    """
    x = np.asarray(x, dtype=ndcore.real_dtype())
    out = np.zeros(x.shape + (degree + 1,), dtype=x.dtype)
    if degree == 0:
        return out
    u = _basis_stack(x, degree - 1, PolyKind.SECOND)
    if kind is PolyKind.FIRST:
        out[..., 1:] = np.arange(1, degree + 1, dtype=x.dtype) * u
    else:
        out[..., 1] = 2.0
        for k in range(2, degree + 1):
            out[..., k] = 2.0 * u[..., k - 1] + 2.0 * x * out[..., k - 1] - out[..., k - 2]
    return out


def eval_basis(x, degree, kind=PolyKind.FIRST):
    """[P_0(x), ..., P_degree(x)] for a scalar x, by the three-term recurrence."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if not np.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return _basis_stack(float(x), degree, kind)


def eval_basis_batch(x, degree, kind=PolyKind.FIRST):
    """Basis values of a [batch, in] matrix as a [batch, in, degree+1] tensor."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    x = ndcore.as_mat(x)
    if not np.all(np.isfinite(x)):
        raise ValueError("basis input must be finite")
    return BasisTensor(values=_basis_stack(x, degree, kind), degree=degree, kind=kind)


def eval_basis_derivative(x, degree, kind=PolyKind.FIRST):
    """[P'_0(x), ..., P'_degree(x)] for a scalar x; P'_0 is always 0."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    if not np.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    return _derivative_stack(float(x), degree, kind)


def roots(n):
    """The n zeros of T_n: cos((2k+1) pi / (2n)), k = 0..n-1, strictly decreasing."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = np.arange(n, dtype=np.float64)
    return np.cos((2.0 * k + 1.0) / (2.0 * n) * np.pi)


def extrema(n):
    """The n+1 extrema of T_n: cos(k pi / n), k = 0..n, where T_n alternates +/-1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = np.arange(n + 1, dtype=np.float64)
    return np.cos(k * np.pi / n)


def gauss_chebyshev(nodes, kind=PolyKind.FIRST):
    """Gauss-Chebyshev nodes and weights of the given kind.

    First kind: nodes cos((2k+1) pi / (2N)) with uniform weight pi/N, for the
    weight 1/sqrt(1-x^2). Second kind: nodes cos(k pi / (N+1)), k = 1..N, with
    weights (pi/(N+1)) sin^2(k pi/(N+1)), for the weight sqrt(1-x^2). Both are
    exact for polynomial integrands of degree < 2N.
    """
    if nodes < 1:
        raise ValueError(f"nodes must be >= 1, got {nodes}")
    if kind is PolyKind.FIRST:
        k = np.arange(nodes, dtype=np.float64)
        x = np.cos((2.0 * k + 1.0) * np.pi / (2.0 * nodes))
        w = np.full(nodes, np.pi / nodes)
    else:
        t = np.arange(1, nodes + 1, dtype=np.float64) * np.pi / (nodes + 1)
        x = np.cos(t)
        w = (np.pi / (nodes + 1)) * np.sin(t) ** 2
    return x, w


def orthogonality_integral(m, n, kind=PolyKind.FIRST, nodes=64):
    """Weighted inner product of P_m and P_n over [-1, 1] by matching quadrature.

    For the first kind this is 0 (m != n), pi/2 (m = n != 0), or pi (m = n = 0);
    for the second kind, 0 (m != n) or pi/2 (m = n).
    """
    if m < 0 or n < 0:
        raise ValueError("polynomial indices must be >= 0")
    if nodes < m + n + 1:
        raise ValueError(
            f"need at least m+n+1 = {m + n + 1} nodes for an exact product, got {nodes}"
        )
    x, w = gauss_chebyshev(nodes, kind)
    vals = _basis_stack(x, max(m, n), kind)
    return float(np.sum(w * vals[..., m] * vals[..., n]))
