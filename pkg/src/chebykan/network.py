"""Sequential layer composition, parameter counting, and save/load.

The digit-classification architecture is [784, 32, 16, 10] with LayerNorm
after the first two KAN layers. Those widths are reconstructed from the
trainable-parameter totals: the per-degree increment 25,760 factors as
784*32 + 32*16 + 16*10, and the degree-independent residual 96 = 2*(32+16)
is exactly the LayerNorm scale/shift on the two interior boundaries. The
closed-form count here is the single source of truth for every reported
parameter total.
"""

from dataclasses import dataclass, field

import numpy as np

from .chebyshev import PolyKind
from .layers import ChebyKanLayer, DenseLayer, InitMethod, LayerNorm, init_coeffs
from .ndcore import Rng

MNIST_WIDTHS = [784, 32, 16, 10]

_HEADER_TAG = "chebykan-v1"


@dataclass
class ArchSpec:
    """Widths plus shared degree/kind and LayerNorm placement for a KAN stack."""

    widths: list
    degree: int
    kind: PolyKind = PolyKind.FIRST
    layernorm_between: bool = True

    def validate(self):
        if len(self.widths) < 2:
            raise ValueError(f"need at least 2 widths, got {self.widths}")
        if any(w < 1 for w in self.widths):
            raise ValueError(f"all widths must be >= 1, got {self.widths}")
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")

    def arch_string(self):
        w = ",".join(str(int(v)) for v in self.widths)
        ln = 1 if self.layernorm_between else 0
        return f"widths={w};degree={self.degree};kind={self.kind.value};ln={ln}"

    @classmethod
    def from_arch_string(cls, s):
        fields = {}
        for part in s.strip().split(";"):
            if "=" not in part:
                raise ValueError(f"bad arch-string fragment {part!r} in {s!r}")
            key, val = part.split("=", 1)
            fields[key] = val
        try:
            widths = [int(v) for v in fields["widths"].split(",")]
            degree = int(fields["degree"])
            kind = PolyKind(fields["kind"])
            ln = bool(int(fields["ln"]))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"malformed arch-string {s!r}") from exc
        spec = cls(widths=widths, degree=degree, kind=kind, layernorm_between=ln)
        spec.validate()
        return spec


def param_count(spec):
    """Trainable parameters of the network `build` would produce for this spec."""
    spec.validate()
    w = spec.widths
    kan = sum(a * b for a, b in zip(w[:-1], w[1:])) * (spec.degree + 1)
    ln = 2 * sum(w[1:-1]) if spec.layernorm_between else 0
    return kan + ln


class Sequential:
    """Ordered layer stack; forward composes in order, backward in reverse."""

    def __init__(self, layers):
        self.layers = list(layers)
        self.training = True

    def train(self, mode=True):
        self.training = mode
        for layer in self.layers:
            layer.training = mode
        return self

    def eval(self):
        return self.train(False)

    def forward(self, x):
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dLdy):
        for layer in reversed(self.layers):
            dLdy = layer.backward(dLdy)
        return dLdy

    def params(self):
        out = []
        for layer in self.layers:
            out.extend(layer.params())
        return out

    def grads(self):
        out = []
        for layer in self.layers:
            out.extend(layer.grads())
        return out

    def param_count(self):
        return sum(p.size for p in self.params())


def build(spec, init=InitMethod.XAVIER, rng=None):
    """KAN stack per spec: LayerNorm follows each KAN layer except the last.

    Each layer initializes from its own substream, so changing one width
    never shifts another layer's draws.
    """
    spec.validate()
    if rng is None:
        rng = Rng(0, "build")
    layers = []
    n_pairs = len(spec.widths) - 1
    for k in range(n_pairs):
        kan = ChebyKanLayer(spec.widths[k], spec.widths[k + 1], spec.degree, spec.kind)
        init_coeffs(kan, init, rng.substream(f"kan{k}"))
        layers.append(kan)
        if spec.layernorm_between and k < n_pairs - 1:
            layers.append(LayerNorm(spec.widths[k + 1]))
    return Sequential(layers)


def mnist_arch(degree=3, kind=PolyKind.FIRST):
    return ArchSpec(widths=list(MNIST_WIDTHS), degree=degree, kind=kind, layernorm_between=True)


def build_mlp(widths, rng):
    """ReLU MLP baseline of the same widths (final layer linear)."""
    layers = []
    for k, (a, b) in enumerate(zip(widths[:-1], widths[1:])):
        act = "relu" if k < len(widths) - 2 else "none"
        dense = DenseLayer(a, b, activation=act)
        dense.init_weights(rng.substream(f"dense{k}"))
        layers.append(dense)
    return Sequential(layers)


def save_network(seq, spec, path):
    """One ASCII header line, then every parameter tensor as little-endian f64.

    Header: ``chebykan-v1 <arch-string> <degree> <kind>``. Tensors follow in
    declaration order (coefficients per KAN layer, gamma then beta per
    LayerNorm, W then b per Dense), each flattened row-major.
    """
    spec.validate()
    if seq.param_count() != param_count(spec):
        raise ValueError(
            f"network has {seq.param_count()} parameters but spec implies {param_count(spec)}"
        )
    header = f"{_HEADER_TAG} {spec.arch_string()} {spec.degree} {spec.kind.value}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for p in seq.params():
            fh.write(np.ascontiguousarray(p, dtype="<f8").tobytes())


def load_network(path):
    """Rebuild the (Sequential, ArchSpec) pair written by save_network."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").rstrip("\n")
        blob = fh.read()
    parts = header.split(" ")
    if len(parts) != 4 or parts[0] != _HEADER_TAG:
        raise ValueError(f"unrecognized header {header!r}")
    spec = ArchSpec.from_arch_string(parts[1])
    if int(parts[2]) != spec.degree or PolyKind(parts[3]) != spec.kind:
        raise ValueError(f"header degree/kind disagree with arch-string: {header!r}")
    flat = np.frombuffer(blob, dtype="<f8")
    if flat.size != param_count(spec):
        raise ValueError(
            f"parameter stream holds {flat.size} values, spec implies {param_count(spec)}"
        )
    seq = build(spec, init=InitMethod.UNIFORM, rng=Rng(0, "load"))
    offset = 0
    for p in seq.params():
        p[...] = flat[offset:offset + p.size].reshape(p.shape)
        offset += p.size
    return seq, spec
