"""Training loop, evaluation, gradient checking, and the ablation matrix.

Runs are deterministic for a fixed seed: shuffle order, initialization, and
the fractal/function data all come from named substreams of the run seed.
CSV schemas (exact headers): per-epoch runs use
``epoch,train_loss,test_loss,metric``; ablations use
``axis_value,test_accuracy,test_loss,param_count,wall_time_s``.
"""

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import network
from .chebyshev import PolyKind
from .data import Dataset, NormScheme, apply_norm, sample_function
from .layers import ChebyKanLayer, DenseLayer, InitMethod, LayerNorm
from .ndcore import Rng
from .network import ArchSpec, build
from .optim import Adam, Sgd, mse_loss, softmax_cross_entropy

RUN_CSV_HEADER = "epoch,train_loss,test_loss,metric"
ABLATION_CSV_HEADER = "axis_value,test_accuracy,test_loss,param_count,wall_time_s"

INIT_SWEEP = [InitMethod.XAVIER, InitMethod.HE, InitMethod.NORMAL,
              InitMethod.UNIFORM, InitMethod.LECUN, InitMethod.ORTHOGONAL]
DEGREE_SWEEP = [2, 3, 4, 5]
NORM_SWEEP = [NormScheme.TANH, NormScheme.MINMAX, NormScheme.STANDARDIZE]
KIND_SWEEP = [PolyKind.FIRST, PolyKind.SECOND]

# function-approximation recipe used by the polynomial-kind comparison
KIND_FUNCTION_RECIPE = dict(target="sin_plus_sq", lo=-2.0, hi=2.0, n=2000,
                            test_n=500, widths=(1, 8, 1), degree=4,
                            lr=1e-2, steps=2000)


class DivergenceError(RuntimeError):
    """Training produced a non-finite loss."""


@dataclass
class TrainConfig:
    epochs: int = 10
    batch_size: int = 64
    lr: float = 1e-3
    optimizer: str = "adam"
    seed: int = 42
    init: InitMethod = InitMethod.XAVIER
    norm: NormScheme = NormScheme.TANH
    degree: int = 3
    kind: PolyKind = PolyKind.FIRST
    widths: list = field(default_factory=lambda: list(network.MNIST_WIDTHS))
    layernorm: bool = True
    momentum: float = 0.9  # sgd only
    max_steps: int = None  # optional hard cap on optimizer steps

    def validate(self):
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs must be >= 0 and batch_size >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"optimizer must be 'adam' or 'sgd', got {self.optimizer!r}")

    def arch(self):
        return ArchSpec(widths=list(self.widths), degree=self.degree,
                        kind=self.kind, layernorm_between=self.layernorm)


@dataclass
class EpochRow:
    epoch: int
    train_loss: float
    test_loss: float
    metric: float


@dataclass
class RunRecord:
    rows: list
    final_metric: float
    param_count: int
    wall_time_s: float

    def csv_lines(self):
        lines = [RUN_CSV_HEADER]
        for r in self.rows:
            lines.append(f"{r.epoch},{r.train_loss!r},{r.test_loss!r},{r.metric!r}")
        return lines


def _make_optimizer(cfg):
    if cfg.optimizer == "adam":
        return Adam(lr=cfg.lr)
    return Sgd(lr=cfg.lr, momentum=cfg.momentum)


def _loss_and_metric(model, ds, task, chunk=1024):
    """Full-dataset loss and metric with the model frozen (eval mode)."""
    was_training = model.training
    model.eval()
    n = len(ds)
    loss_sum = 0.0
    correct = 0
    sq_sum = 0.0
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        y = model.forward(ds.features[start:stop])
        if task == "classify":
            loss, _ = softmax_cross_entropy(y, ds.labels[start:stop])
            loss_sum += loss * (stop - start)
            correct += int(np.sum(np.argmax(y, axis=1) == ds.labels[start:stop]))
        else:
            diff = y - ds.targets[start:stop]
            sq_sum += float(np.sum(diff * diff))
    model.train(was_training)
    if task == "classify":
        return loss_sum / n, correct / n
    mse = sq_sum / (n * ds.targets.shape[1])
    return mse, mse


def evaluate(model, ds, task):
    """classify -> argmax-match fraction (argmax ties go to the lower class index);
    regress -> mean squared error."""
    if task not in ("classify", "regress"):
        raise ValueError(f"task must be 'classify' or 'regress', got {task!r}")
    _, metric = _loss_and_metric(model, ds, task)
    return metric


def train(model, train_ds, test_ds, cfg):
    """Minibatch training; returns per-epoch rows plus a final summary.

    Shuffle order comes from the (seed, "train/shuffle") substream, so a rerun
    with the same config reproduces the trajectory exactly. A non-finite batch
    loss aborts with the offending epoch/batch named. epochs=0 just evaluates
    the initialized model (a single epoch-0 row).
    """
    cfg.validate()
    task = "classify" if train_ds.labels is not None else "regress"
    rng = Rng(cfg.seed, "train/shuffle")
    opt = _make_optimizer(cfg)
    params = model.params()
    t0 = time.perf_counter()
    rows = []
    if cfg.epochs == 0:
        train_loss, _ = _loss_and_metric(model, train_ds, task)
        test_loss, metric = _loss_and_metric(model, test_ds, task)
        rows.append(EpochRow(0, train_loss, test_loss, metric))
    n = len(train_ds)
    step = 0
    stop_early = False
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        loss_sum = 0.0
        for bi, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start:start + cfg.batch_size]
            y = model.forward(train_ds.features[idx])
            if task == "classify":
                loss, dLdy = softmax_cross_entropy(y, train_ds.labels[idx])
            else:
                loss, dLdy = mse_loss(y, train_ds.targets[idx])
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"non-finite training loss at epoch {epoch}, batch {bi}"
                )
            model.backward(dLdy)
            opt.step(params, model.grads())
            loss_sum += loss * len(idx)
            step += 1
            if cfg.max_steps is not None and step >= cfg.max_steps:
                stop_early = True
                break
        test_loss, metric = _loss_and_metric(model, test_ds, task)
        rows.append(EpochRow(epoch, loss_sum / n, test_loss, metric))
        if stop_early:
            break
    wall = time.perf_counter() - t0
    final_metric = rows[-1].metric if rows else float("nan")
    return RunRecord(rows=rows, final_metric=final_metric,
                     param_count=model.param_count(), wall_time_s=wall)


def _forward_hp(model, x):
    """Independent extended-precision forward pass, the finite-difference oracle.

    Deliberately a separate implementation from the layers' own forward (einsum
    contraction instead of the reshape-matmul), run in longdouble so the
    probe's rounding noise sits well below the 1e-5 relative-error gate even
    where a gradient entry happens to be tiny.
    """
    h = np.asarray(x, dtype=np.longdouble)
    for layer in model.layers:
        if isinstance(layer, ChebyKanLayer):
            xt = np.tanh(h)
            n1 = layer.degree + 1
            basis = np.empty(xt.shape + (n1,), dtype=np.longdouble)
            basis[..., 0] = 1.0
            if layer.degree >= 1:
                basis[..., 1] = xt if layer.kind is PolyKind.FIRST else 2.0 * xt
                for k in range(2, n1):
                    basis[..., k] = 2.0 * xt * basis[..., k - 1] - basis[..., k - 2]
            h = np.einsum("bij,ioj->bo", basis, layer.coeffs.astype(np.longdouble))
        elif isinstance(layer, LayerNorm):
            mean = h.mean(axis=1, keepdims=True)
            var = np.mean((h - mean) ** 2, axis=1, keepdims=True)
            xhat = (h - mean) / np.sqrt(var + layer.eps)
            h = layer.gamma.astype(np.longdouble) * xhat + layer.beta.astype(np.longdouble)
        elif isinstance(layer, DenseLayer):
            z = h @ layer.W.astype(np.longdouble) + layer.b.astype(np.longdouble)
            h = np.maximum(z, 0.0) if layer.activation == "relu" else z
        else:
            raise TypeError(f"no high-precision forward for {type(layer).__name__}")
    return h


def grad_check(trials=100, h=1e-6, seed=1234, corrupt=False):
    """Worst finite-difference relative error over random small networks.

    Each trial draws widths (2-3 layers, 1-4 units), degree 0-6, either
    polynomial kind, and LayerNorm on/off, then perturbs every parameter and
    every input coordinate by +/-h around a weighted sum-of-squares loss,
    differencing the independent `_forward_hp` oracle. Relative error is
    |analytic - numeric| / max(1e-12, |numeric|); the denominator uses the
    actually-stored step (old+h) - (old-h), exact in float64, so step
    representation error drops out. Degree-0 networks have identically zero
    input gradients, which is asserted exactly instead of being
    finite-differenced. ``corrupt=True`` flips the sign of the largest
    analytic gradient entry — a self-test that the harness does flag a broken
    backward pass.
    """
    root = Rng(seed, "gradcheck")
    worst = 0.0

    for trial in range(trials):
        r = root.substream(f"trial{trial}")
        n_layers = r.integers(1, 3)
        widths = [r.integers(1, 5) for _ in range(n_layers + 1)]
        degree = r.integers(0, 7)
        kind = PolyKind.FIRST if r.integers(0, 2) == 0 else PolyKind.SECOND
        use_ln = r.integers(0, 2) == 1
        batch = r.integers(1, 4)
        spec = ArchSpec(widths=widths, degree=degree, kind=kind, layernorm_between=use_ln)
        model = build(spec, InitMethod.LECUN, r.substream("init"))
        x = r.uniform(-1.5, 1.5, (batch, widths[0]))
        w = r.uniform(0.5, 1.5, (batch, widths[-1]))
        w_hp = np.asarray(w, dtype=np.longdouble)

        model.train()
        y = model.forward(x)
        dLdx = model.backward(2.0 * w * y)
        analytic = [g.copy() for g in model.grads()]

        if corrupt:
            flat_all = np.concatenate([g.ravel() for g in analytic])
            k = int(np.argmax(np.abs(flat_all)))
            for g in analytic:
                if k < g.size:
                    g.flat[k] = -g.flat[k]
                    break
                k -= g.size

        def loss_hp(xin):
            out = _forward_hp(model, xin)
            return np.sum(w_hp * out * out)

        def fd(arr, i, xin):
            old = arr.flat[i]
            arr.flat[i] = old + h
            up = arr.flat[i]
            lp = loss_hp(xin)
            arr.flat[i] = old - h
            down = arr.flat[i]
            lm = loss_hp(xin)
            arr.flat[i] = old
            return float((lp - lm) / np.longdouble(up - down))

        for p, ga in zip(model.params(), analytic):
            for i in range(p.size):
                num = fd(p, i, x)
                rel = abs(ga.flat[i] - num) / max(1e-12, abs(num))
                worst = max(worst, rel)

        if degree == 0:
            worst = max(worst, float(np.max(np.abs(dLdx), initial=0.0)))
        else:
            xp = x.copy()
            for i in range(x.size):
                num = fd(xp, i, xp)
                rel = abs(dLdx.flat[i] - num) / max(1e-12, abs(num))
                worst = max(worst, rel)

    return float(worst)


@dataclass
class AblationRow:
    axis_value: str
    test_accuracy: float
    test_loss: float
    param_count: int
    wall_time_s: float

    def csv_line(self):
        return (f"{self.axis_value},{self.test_accuracy!r},{self.test_loss!r},"
                f"{self.param_count},{self.wall_time_s!r}")


def _run_classifier(cfg, train_raw, test_raw):
    """Normalize (train stats reused for test), build, train; returns the record."""
    tr = apply_norm(train_raw, cfg.norm)
    te = apply_norm(test_raw, cfg.norm, stats=tr.norm)
    model = build(cfg.arch(), cfg.init, Rng(cfg.seed, "init"))
    return train(model, tr, te, cfg)


def _run_kind_function(kind, seed):
    """Function-approximation MSE for one polynomial kind (fixed small recipe)."""
    rec = KIND_FUNCTION_RECIPE
    rng = Rng(seed, "kind-function")
    train_ds = sample_function(rec["target"], rec["lo"], rec["hi"], rec["n"],
                               rng.substream("train"))
    test_ds = sample_function(rec["target"], rec["lo"], rec["hi"], rec["test_n"],
                              rng.substream("test"))
    cfg = TrainConfig(epochs=10 ** 9, batch_size=64, lr=rec["lr"], seed=seed,
                      degree=rec["degree"], kind=kind, widths=list(rec["widths"]),
                      max_steps=rec["steps"])
    model = build(cfg.arch(), cfg.init, Rng(seed, "init"))
    return train(model, train_ds, test_ds, cfg)


def run_ablation(axis, base_cfg, train_raw, test_raw):
    """Sweep one axis against the digit-classification task.

    init sweeps the six coefficient initializations, degree sweeps 2-5, norm
    sweeps the three input schemes. kind compares the two polynomial kinds:
    test_accuracy comes from the classification run, while the test_loss
    column reports the function-approximation MSE for that kind.
    Rows are emitted in sweep order; param_count always comes from
    network.param_count on the swept spec.
    """
    rows = []
    records = []
    if axis == "init":
        sweep = [(m.value, replace(base_cfg, init=m)) for m in INIT_SWEEP]
    elif axis == "degree":
        sweep = [(str(d), replace(base_cfg, degree=d)) for d in DEGREE_SWEEP]
    elif axis == "norm":
        sweep = [(s.value, replace(base_cfg, norm=s)) for s in NORM_SWEEP]
    elif axis == "kind":
        sweep = [(k.value, replace(base_cfg, kind=k)) for k in KIND_SWEEP]
    else:
        raise ValueError(f"unknown ablation axis {axis!r}; "
                         "choose init, degree, norm, or kind")
    for value, cfg in sweep:
        rec = _run_classifier(cfg, train_raw, test_raw)
        wall = rec.wall_time_s
        if axis == "kind":
            func_rec = _run_kind_function(cfg.kind, cfg.seed)
            test_loss = func_rec.final_metric
            wall += func_rec.wall_time_s
        else:
            test_loss = rec.rows[-1].test_loss
        expected = network.param_count(cfg.arch())
        assert rec.param_count == expected, "param_count drifted from the spec formula"
        rows.append(AblationRow(axis_value=value, test_accuracy=rec.final_metric,
                                test_loss=test_loss, param_count=expected,
                                wall_time_s=wall))
        records.append(rec)
    return rows, records


def write_run_csv(record, path, comments=()):
    lines = [f"# {c}" for c in comments]
    lines.extend(record.csv_lines())
    lines.append(f"# wall_time_s = {record.wall_time_s!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_ablation_csv(rows, path, comments=()):
    lines = [f"# {c}" for c in comments]
    lines.append(ABLATION_CSV_HEADER)
    lines.extend(r.csv_line() for r in rows)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
