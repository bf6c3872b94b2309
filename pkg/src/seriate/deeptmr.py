"""Two-way reordering with a row encoder, a column encoder and an entry decoder.

Each entry ``A[i, j]`` is reconstructed as ``DEC(ROWENC(A[i, :]),
COLENC(A[:, j]))`` where both encoders emit a single number.  After training,
sorting the encoder outputs gives the row and column orders, and the decoder
evaluated on the whole grid gives a denoised matrix.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import neuralnet as nn
from .errors import BadShape, DimensionMismatch, NonFiniteLoss
from .matcore import apply_permutation, argsort, as_matrix
from .prng import EpochSampler, Rng, sample_batch

# Table-1 style hyperparameters per experiment.
PRESETS = {
    "lbm": dict(learning_rate=1e-2, epochs=100, lam=1e-10, batch_size=200),
    "spm": dict(learning_rate=1e-2, epochs=100, lam=1e-10, batch_size=200),
    "gbm": dict(learning_rate=1e-2, epochs=100, lam=1e-10, batch_size=200),
    "dgm": dict(learning_rate=1e-2, epochs=200, lam=1e-10, batch_size=200),
    "divorce": dict(learning_rate=1e-2, epochs=200, lam=1e-10, batch_size=500),
    "traffic": dict(learning_rate=1e-2, epochs=100, lam=1e-10, batch_size=500),
}

SAMPLING_MODES = ("replacement", "epoch")


@dataclass
class TrainConfig:
    learning_rate: float = 1e-2
    epochs: int = 100
    lam: float = 1e-10
    batch_size: int = 200
    row_hidden: tuple[int, ...] = (10,)
    col_hidden: tuple[int, ...] = (10,)
    dec_hidden: tuple[int, ...] = (10,)
    hidden_activation: str = "tanh"
    output_activation: str = "identity"
    seed: int = 0
    restarts: int = 1
    loss_window: int = 100
    sampling: str = "replacement"
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def __post_init__(self):
        self.row_hidden = tuple(int(w) for w in self.row_hidden)
        self.col_hidden = tuple(int(w) for w in self.col_hidden)
        self.dec_hidden = tuple(int(w) for w in self.dec_hidden)
        if self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1:
            raise ValueError("learning rate, epochs and batch size must be positive")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.restarts < 1 or self.loss_window < 1:
            raise ValueError("restarts and loss_window must be at least 1")
        if any(w < 1 for w in self.row_hidden + self.col_hidden + self.dec_hidden):
            raise ValueError("hidden widths must be positive")
        if self.sampling not in SAMPLING_MODES:
            raise ValueError(f"sampling must be one of {SAMPLING_MODES}")

    @classmethod
    def preset(cls, name: str, **overrides) -> "TrainConfig":
        return cls(**{**PRESETS[name], **overrides})

    def n_iterations(self, n: int, p: int) -> int:
        """``ceil(T * n * p / batch)`` Adam steps."""
        return -(-self.epochs * n * p // self.batch_size)

    def as_dict(self) -> dict:
        d = asdict(self)
        for key in ("row_hidden", "col_hidden", "dec_hidden"):
            d[key] = list(d[key])
        return d


@dataclass
class DeepTmrModel:
    row_encoder: nn.Mlp
    column_encoder: nn.Mlp
    decoder: nn.Mlp

    def __post_init__(self):
        if self.row_encoder.layer_sizes[-1] != 1 or self.column_encoder.layer_sizes[-1] != 1:
            raise BadShape("encoders must emit a single feature")
        if self.decoder.layer_sizes[0] != 2 or self.decoder.layer_sizes[-1] != 1:
            raise BadShape("decoder must map two features to one value")

    @property
    def nets(self) -> tuple[nn.Mlp, nn.Mlp, nn.Mlp]:
        return self.row_encoder, self.column_encoder, self.decoder

    @property
    def shape(self) -> tuple[int, int]:
        """(n, p) of the matrix the model was built for."""
        return self.column_encoder.layer_sizes[0], self.row_encoder.layer_sizes[0]

    @classmethod
    def initialize(cls, n: int, p: int, cfg: TrainConfig, rng: Rng) -> "DeepTmrModel":
        act = dict(hidden_activation=cfg.hidden_activation, output_activation=cfg.output_activation)
        return cls(
            nn.glorot_init((p, *cfg.row_hidden, 1), rng, **act),
            nn.glorot_init((n, *cfg.col_hidden, 1), rng, **act),
            nn.glorot_init((2, *cfg.dec_hidden, 1), rng, **act),
        )

    def save(self, path) -> None:
        nn.save_checkpoint(path, {"row_encoder": self.row_encoder, "column_encoder": self.column_encoder,
                                  "decoder": self.decoder})

    @classmethod
    def load(cls, path) -> "DeepTmrModel":
        nets = nn.load_checkpoint(path)
        return cls(nets["row_encoder"], nets["column_encoder"], nets["decoder"])


@dataclass
class ReorderResult:
    row_perm: np.ndarray
    col_perm: np.ndarray
    g: np.ndarray
    h: np.ndarray
    reordered_observed: np.ndarray
    reordered_denoised: np.ndarray
    final_loss: nn.LossReport
    loss_history: np.ndarray
    model: DeepTmrModel | None = None
    selection_scores: list[float] = field(default_factory=list)
    selected_restart: int = 0

    @property
    def selection_score(self) -> float:
        return self.selection_scores[self.selected_restart] if self.selection_scores else math.nan


def row_vector(A, i: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if not 0 <= i < A.shape[0]:
        raise IndexError(f"row {i} out of range for {A.shape[0]} rows")
    return A[i, :].copy()


def col_vector(A, j: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if not 0 <= j < A.shape[1]:
        raise IndexError(f"column {j} out of range for {A.shape[1]} columns")
    return A[:, j].copy()


def predict_entry(model: DeepTmrModel, r, c) -> float:
    r = np.asarray(r, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if r.shape != (model.row_encoder.layer_sizes[0],) or c.shape != (model.column_encoder.layer_sizes[0],):
        raise DimensionMismatch(f"row length {r.size} / column length {c.size} do not fit model {model.shape}")
    return float(nn.predict(model.nets, (r[None, :], c[None, :]))[0, 0])


def encode_features(model: DeepTmrModel, A):
    """Row features ``g`` (one per row) and column features ``h`` (one per column)."""
    A = np.asarray(A, dtype=np.float64)
    if A.shape != model.shape:
        raise DimensionMismatch(f"matrix shape {A.shape} does not fit model {model.shape}")
    g = nn.forward(model.row_encoder, A)[0][:, 0]
    h = nn.forward(model.column_encoder, A.T)[0][:, 0]
    return g, h


def denoised_matrix(model: DeepTmrModel, A) -> np.ndarray:
    """Decoder output for every (i, j) of ``A``, in the original order."""
    g, h = encode_features(model, A)
    n, p = g.size, h.size
    grid = np.column_stack([np.repeat(g, p), np.tile(h, n)])
    return nn.forward(model.decoder, grid)[0].reshape(n, p)


def _sampler(cfg: TrainConfig, rng: Rng, n: int, p: int):
    if cfg.sampling == "epoch":
        return EpochSampler(rng, n, p)
    return lambda batch: sample_batch(rng, n, p, batch)


def train(A, cfg: TrainConfig, rng: Rng | None = None):
    """Fit a fresh model to ``A`` with mini-batch Adam.

    Runs exactly ``cfg.n_iterations(n, p)`` steps and returns
    ``(model, loss_history)`` where the history holds the total batch loss
    of every step.  A non-finite loss raises :class:`NonFiniteLoss`.
    """
    A = as_matrix(A)
    if rng is None:
        rng = Rng(cfg.seed)
    n, p = A.shape
    model = DeepTmrModel.initialize(n, p, cfg, rng.child(0))
    draw = _sampler(cfg, rng.child(1), n, p)
    AT = np.ascontiguousarray(A.T)
    params = nn.parameters(model.nets)
    state = nn.AdamState.fresh(params, learning_rate=cfg.learning_rate, beta1=cfg.beta1,
                               beta2=cfg.beta2, epsilon=cfg.epsilon)
    iterations = cfg.n_iterations(n, p)
    history = np.empty(iterations)
    for t in range(iterations):
        rows, cols = draw(cfg.batch_size)
        report, grads = nn.loss_and_gradients(model.nets, (A[rows], AT[cols]), A[rows, cols], cfg.lam)
        if not math.isfinite(report.total):
            raise NonFiniteLoss(f"non-finite loss at iteration {t}: {report.as_dict()}")
        nn.adam_step(params, grads, state)
        history[t] = report.total
    return model, history


def full_loss(model: DeepTmrModel, A, lam: float) -> nn.LossReport:
    """Regularised loss over every entry of ``A`` (not a mini-batch)."""
    A = np.asarray(A, dtype=np.float64)
    resid = A - denoised_matrix(model, A)
    reg = sum(float(np.sum(w * w)) for w in nn.parameters(model.nets).values())
    return nn.LossReport(float(np.mean(resid * resid)), lam * reg)


def reorder_by_features(A, model: DeepTmrModel, lam: float = 0.0, loss_history=None) -> ReorderResult:
    A = as_matrix(A)
    g, h = encode_features(model, A)
    row_perm, col_perm = argsort(g), argsort(h)
    denoised = denoised_matrix(model, A)
    return ReorderResult(
        row_perm=row_perm,
        col_perm=col_perm,
        g=g,
        h=h,
        reordered_observed=apply_permutation(A, row_perm, col_perm),
        reordered_denoised=apply_permutation(denoised, row_perm, col_perm),
        final_loss=full_loss(model, A, lam),
        loss_history=np.asarray(loss_history if loss_history is not None else []),
        model=model,
    )


def train_with_restarts(A, cfg: TrainConfig) -> ReorderResult:
    """Train ``cfg.restarts`` models and keep the one with the lowest late loss.

    Restart ``k`` uses the generator ``Rng(cfg.seed, (k,))``.  The score of a
    run is the mean total loss over its last ``cfg.loss_window`` iterations;
    runs that hit a non-finite loss score ``inf`` and are never selected.
    """
    A = as_matrix(A)
    scores, runs, failures = [], [], []
    for k in range(cfg.restarts):
        try:
            model, history = train(A, cfg, Rng(cfg.seed, (k,)))
        except NonFiniteLoss as exc:
            scores.append(math.inf)
            runs.append(None)
            failures.append(f"restart {k}: {exc}")
            continue
        scores.append(float(np.mean(history[-cfg.loss_window:])))
        runs.append((model, history))
    if all(run is None for run in runs):
        raise NonFiniteLoss("every restart diverged; " + "; ".join(failures))
    best = int(np.argmin(scores))
    model, history = runs[best]
    result = reorder_by_features(A, model, cfg.lam, history)
    result.selection_scores = scores
    result.selected_restart = best
    return result
