"""Trainable layers: the Chebyshev KAN layer, LayerNorm, and a dense baseline.

Every layer follows the same protocol: ``forward(x)`` caches whatever the
matching ``backward(dLdy)`` needs (only while ``training`` is True, so
inference on a frozen layer never mutates it), ``backward`` overwrites the
parameter gradients fresh and returns dL/dx. ``params()`` and ``grads()``
expose tensors in declaration order.
"""

import math
from enum import Enum

import numpy as np

from . import ndcore
from .chebyshev import PolyKind, _basis_stack, _derivative_stack
from .ndcore import ShapeError


class InitMethod(Enum):
    XAVIER = "xavier"
    HE = "he"
    NORMAL = "normal"
    UNIFORM = "uniform"
    LECUN = "lecun"
    ORTHOGONAL = "orthogonal"


class ChebyKanLayer:
    """Polynomial-basis layer: y[b,o] = sum_{i,j} P_j(tanh(x[b,i])) * coeffs[i,o,j].

    The tanh squashes every layer's input into (-1, 1) before the basis is
    built — it is part of the layer, not a dataset preprocessing step, so
    hidden activations stay in the range where the basis is well behaved.
    ``coeffs`` has shape [input_dim, output_dim, degree+1]; the contraction is
    evaluated as a reshape-to-matmul, which the tests pin against a brute
    force triple loop.
    """

    def __init__(self, input_dim, output_dim, degree, kind=PolyKind.FIRST):
        if input_dim < 1 or output_dim < 1:
            raise ValueError(f"dims must be >= 1, got {input_dim}x{output_dim}")
        if degree < 0:
            raise ValueError(f"degree must be >= 0, got {degree}")
        self.input_dim = input_dim
        self.output_dim = output_dim
        self.degree = degree
        self.kind = kind
        self.coeffs = ndcore.zeros((input_dim, output_dim, degree + 1))
        self.grad_coeffs = np.zeros_like(self.coeffs)
        self.training = True
        self._cache = None

    @property
    def param_count(self):
        return self.coeffs.size

    def _coeffs_as_matrix(self):
        # [i, o, j] -> [i*(n+1)+j, o] so the contraction is a single matmul
        n1 = self.degree + 1
        return self.coeffs.transpose(0, 2, 1).reshape(self.input_dim * n1, self.output_dim)

    def forward(self, x):
        x = ndcore.as_mat(x)
        if x.shape[1] != self.input_dim:
            raise ShapeError(f"expected input width {self.input_dim}, got {x.shape[1]}")
        xt = np.tanh(x)
        t = _basis_stack(xt, self.degree, self.kind)
        batch = x.shape[0]
        y = t.reshape(batch, -1) @ self._coeffs_as_matrix()
        if self.training:
            self._cache = (x, xt, t)
        return y

    def backward(self, dLdy):
        if self._cache is None:
            raise RuntimeError("backward called before forward (or layer is in eval mode)")
        dLdy = ndcore.as_mat(dLdy)
        x, xt, t = self._cache
        batch = x.shape[0]
        if dLdy.shape != (batch, self.output_dim):
            raise ShapeError(
                f"expected cotangent shape {(batch, self.output_dim)}, got {dLdy.shape}"
            )
        n1 = self.degree + 1
        g = t.reshape(batch, -1).T @ dLdy  # [in*(n+1), out]
        self.grad_coeffs[...] = g.reshape(self.input_dim, n1, self.output_dim).transpose(0, 2, 1)
        if self.degree == 0:
            # constant basis: exactly zero input gradient
            return np.zeros_like(x)
        db = _derivative_stack(xt, self.degree, self.kind)
        gb = (dLdy @ self._coeffs_as_matrix().T).reshape(batch, self.input_dim, n1)
        dLdxt = np.sum(gb * db, axis=2)
        return dLdxt * (1.0 - xt * xt)

    def params(self):
        return [self.coeffs]

    def grads(self):
        return [self.grad_coeffs]


def init_coeffs(layer, method, rng):
    """Populate a ChebyKanLayer's coefficients in place.

    Fan-in/fan-out count basis terms, not just features: each output unit sums
    input_dim*(degree+1) weighted basis values, so fan_in = input_dim*(degree+1)
    and fan_out = output_dim*(degree+1). The orthogonal method QR-orthonormalizes
    a standard normal matrix of shape (input_dim*(degree+1)) x output_dim and
    reshapes it into the coefficient tensor.
    """
    n1 = layer.degree + 1
    fan_in = layer.input_dim * n1
    fan_out = layer.output_dim * n1
    shape = layer.coeffs.shape
    if method is InitMethod.XAVIER:
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        new = rng.uniform(-bound, bound, shape)
    elif method is InitMethod.HE:
        new = rng.normal(0.0, math.sqrt(2.0 / fan_in), shape)
    elif method is InitMethod.LECUN:
        new = rng.normal(0.0, math.sqrt(1.0 / fan_in), shape)
    elif method is InitMethod.NORMAL:
        new = rng.normal(0.0, 1.0, shape)
    elif method is InitMethod.UNIFORM:
        new = rng.uniform(-1.0 / fan_in, 1.0 / fan_in, shape)
    elif method is InitMethod.ORTHOGONAL:
        rows, cols = layer.input_dim * n1, layer.output_dim
        m = rng.normal(0.0, 1.0, (rows, cols))
        if rows >= cols:
            q, r = np.linalg.qr(m)
            q = q * np.where(np.diag(r) < 0, -1.0, 1.0)
        else:
            q, r = np.linalg.qr(m.T)
            q = (q * np.where(np.diag(r) < 0, -1.0, 1.0)).T
        new = q.reshape(layer.input_dim, n1, layer.output_dim).transpose(0, 2, 1)
    else:
        raise ValueError(f"unknown init method: {method}")
    layer.coeffs[...] = new


class LayerNorm:
    """Per-row normalization with learnable scale and shift.

    A constant row has zero variance; eps keeps the division finite, so its
    output is exactly beta.
    """

    def __init__(self, dim, eps=1e-5):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.dim = dim
        self.eps = eps
        self.gamma = ndcore.ones(dim)
        self.beta = ndcore.zeros(dim)
        self.grad_gamma = np.zeros_like(self.gamma)
        self.grad_beta = np.zeros_like(self.beta)
        self.training = True
        self._cache = None

    @property
    def param_count(self):
        return 2 * self.dim

    def forward(self, x):
        x = ndcore.as_mat(x)
        if x.shape[1] != self.dim:
            raise ShapeError(f"expected input width {self.dim}, got {x.shape[1]}")
        mu = x.mean(axis=1, keepdims=True)
        var = x.var(axis=1, keepdims=True)
        inv = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mu) * inv
        if self.training:
            self._cache = (xhat, inv)
        return self.gamma * xhat + self.beta

    def backward(self, dLdy):
        if self._cache is None:
            raise RuntimeError("backward called before forward (or layer is in eval mode)")
        dLdy = ndcore.as_mat(dLdy)
        xhat, inv = self._cache
        if dLdy.shape != xhat.shape:
            raise ShapeError(f"expected cotangent shape {xhat.shape}, got {dLdy.shape}")
        self.grad_beta[...] = dLdy.sum(axis=0)
        self.grad_gamma[...] = (dLdy * xhat).sum(axis=0)
        d = self.dim
        dxhat = dLdy * self.gamma
        return (inv / d) * (
            d * dxhat
            - dxhat.sum(axis=1, keepdims=True)
            - xhat * (dxhat * xhat).sum(axis=1, keepdims=True)
        )

    def params(self):
        return [self.gamma, self.beta]

    def grads(self):
        return [self.grad_gamma, self.grad_beta]


class DenseLayer:
    """Fixed-activation baseline: y = act(x W + b), act in {"relu", "none"}.

    The ReLU subgradient at 0 is defined as 0 so backward is deterministic.
    """

    def __init__(self, input_dim, output_dim, activation="relu"):
        if activation not in ("relu", "none"):
            raise ValueError(f"activation must be 'relu' or 'none', got {activation!r}")
        self.input_dim = input_dim
        self.output_dim = output_dim
        self.activation = activation
        self.W = ndcore.zeros((input_dim, output_dim))
        self.b = ndcore.zeros(output_dim)
        self.grad_W = np.zeros_like(self.W)
        self.grad_b = np.zeros_like(self.b)
        self.training = True
        self._cache = None

    @property
    def param_count(self):
        return self.W.size + self.b.size

    def init_weights(self, rng):
        """He-normal for relu, Xavier-uniform otherwise; bias stays zero."""
        if self.activation == "relu":
            self.W[...] = rng.normal(0.0, math.sqrt(2.0 / self.input_dim), self.W.shape)
        else:
            bound = math.sqrt(6.0 / (self.input_dim + self.output_dim))
            self.W[...] = rng.uniform(-bound, bound, self.W.shape)
        self.b[...] = 0.0

    def forward(self, x):
        x = ndcore.as_mat(x)
        if x.shape[1] != self.input_dim:
            raise ShapeError(f"expected input width {self.input_dim}, got {x.shape[1]}")
        z = x @ self.W + self.b
        y = np.maximum(z, 0.0) if self.activation == "relu" else z
        if self.training:
            self._cache = (x, z)
        return y

    def backward(self, dLdy):
        if self._cache is None:
            raise RuntimeError("backward called before forward (or layer is in eval mode)")
        dLdy = ndcore.as_mat(dLdy)
        x, z = self._cache
        if dLdy.shape != (x.shape[0], self.output_dim):
            raise ShapeError(
                f"expected cotangent shape {(x.shape[0], self.output_dim)}, got {dLdy.shape}"
            )
        dz = dLdy * (z > 0.0) if self.activation == "relu" else dLdy
        self.grad_W[...] = x.T @ dz
        self.grad_b[...] = dz.sum(axis=0)
        return dz @ self.W.T

    def params(self):
        return [self.W, self.b]

    def grads(self):
        return [self.grad_W, self.grad_b]
