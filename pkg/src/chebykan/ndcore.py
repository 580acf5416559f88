"""Dense numerics substrate: validated 2-D/3-D real arrays and a seeded RNG.

Arrays are plain numpy ndarrays (row-major, real dtype); the helpers here pin
down dtype, layout, and the reproducibility contract the rest of the package
relies on. Training math defaults to float64; float32 is opt-in via
``set_real_dtype`` and is not suitable for gradient checking.
"""

import hashlib

import numpy as np

# Type aliases for documentation: a Mat is a 2-D real array, a Ten3 is 3-D.
Mat = np.ndarray
Ten3 = np.ndarray

_MASK64 = (1 << 64) - 1

_real_dtype = np.float64


class ShapeError(ValueError):
    """An operand violated a documented shape contract."""


def set_real_dtype(dtype):
    """Set the working precision; only float32 and float64 are supported."""
    global _real_dtype
    dt = np.dtype(dtype)
    if dt not in (np.dtype(np.float32), np.dtype(np.float64)):
        raise ValueError(f"unsupported real dtype: {dtype}")
    _real_dtype = dt.type


def real_dtype():
    return _real_dtype


def zeros(shape):
    return np.zeros(shape, dtype=_real_dtype)


def ones(shape):
    return np.ones(shape, dtype=_real_dtype)


def as_mat(x):
    """Coerce to a C-contiguous 2-D real array, or raise ShapeError."""
    a = np.ascontiguousarray(x, dtype=_real_dtype)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D array, got shape {a.shape}")
    return a


def as_ten3(x):
    """Coerce to a C-contiguous 3-D real array, or raise ShapeError."""
    a = np.ascontiguousarray(x, dtype=_real_dtype)
    if a.ndim != 3:
        raise ShapeError(f"expected a 3-D array, got shape {a.shape}")
    return a


def matmul(a, b):
    """c[i, j] = sum_t a[i, t] * b[t, j], accumulated at working precision."""
    a = as_mat(a)
    b = as_mat(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dims differ: {a.shape} x {b.shape}")
    return a @ b


class Rng:
    """Deterministic random source with named, independently-derived substreams.

    The generator is PCG64 keyed by ``SeedSequence([seed, *h])`` where ``h``
    is the first 16 bytes of SHA-256 of the stream label, read as four
    big-endian u32 words. Identical (seed, stream, call sequence) therefore
    reproduce bit-for-bit across platforms; ``substream`` derives children by
    extending the label, so adding a new consumer never shifts existing ones.
    """

    def __init__(self, seed, stream="root"):
        self.seed = int(seed) & _MASK64
        self.stream = str(stream)
        digest = hashlib.sha256(self.stream.encode("utf-8")).digest()
        words = [int.from_bytes(digest[i:i + 4], "big") for i in range(0, 16, 4)]
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([self.seed, *words]))
        )

    def substream(self, label):
        return Rng(self.seed, f"{self.stream}/{label}")

    def uniform(self, low=0.0, high=1.0, shape=None):
        if low > high:
            raise ValueError(f"uniform needs low <= high, got [{low}, {high}]")
        out = self._gen.uniform(low, high, shape)
        if shape is None:
            return float(out)
        return out.astype(_real_dtype, copy=False)

    def normal(self, mean=0.0, std=1.0, shape=None):
        if std < 0:
            raise ValueError(f"normal needs std >= 0, got {std}")
        out = self._gen.normal(mean, std, shape)
        if shape is None:
            return float(out)
        return out.astype(_real_dtype, copy=False)

    def permutation(self, n):
        return self._gen.permutation(n)

    def integers(self, low, high):
        """One int drawn uniformly from [low, high)."""
        return int(self._gen.integers(low, high))


def rand_fill(rng, shape, dist):
    """New array of ``shape`` drawn from ``("uniform", a, b)`` or ``("normal", mu, sigma)``."""
    kind, p0, p1 = dist
    if kind == "uniform":
        return rng.uniform(p0, p1, shape)
    if kind == "normal":
        return rng.normal(p0, p1, shape)
    raise ValueError(f"unknown distribution {kind!r}; use 'uniform' or 'normal'")
