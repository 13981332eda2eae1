"""From-scratch K-class multinomial logistic regression.

Objective over n rows with weight matrix W (K x d) and bias b (K):

    loss = -(1/n) sum_i ln p_i[y_i] + (l2 / 2n) * ||W||_F^2
    gW   =  (1/n) (P - Y)^T X + (l2 / n) W
    gb   =  (1/n) sum_i (p_i - onehot(y_i))

with p_i = softmax(W x_i + b); the bias is never regularized.
Training is full-batch gradient descent from zero initialization,
stopping early when the infinity norm of the gradient drops below
``tol``.  With backtracking on, the step is halved (at most 30 times)
until the loss strictly decreases; if no halving helps, training stops.
All of it is sequential and deterministic: identical inputs produce
bitwise-identical models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from rhetrel.errors import DimensionMismatch, EmptyDataset, ModelError, NonFiniteLoss
from rhetrel.features import DesignMatrix, FeatureConfig
from rhetrel.labels import LabelSet

MAX_HALVINGS = 30


@dataclass(frozen=True)
class Hyperparams:
    max_iter: int = 3000
    learning_rate: float = 0.5
    l2: float = 1.0
    tol: float = 1e-6
    backtracking: bool = True

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")

    def to_dict(self) -> dict:
        return {
            "max_iter": self.max_iter,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "tol": self.tol,
            "backtracking": self.backtracking,
        }

    @staticmethod
    def from_dict(data: dict) -> "Hyperparams":
        return Hyperparams(**data)


@dataclass(frozen=True)
class SoftmaxModel:
    W: np.ndarray
    b: np.ndarray
    label_set: LabelSet
    feature_config: FeatureConfig
    trained_hyper: Hyperparams

    def __post_init__(self):
        if self.W.ndim != 2 or self.b.ndim != 1:
            raise DimensionMismatch("W must be K x d and b length K")
        if self.W.shape[0] != len(self.label_set) or self.b.shape[0] != len(
            self.label_set
        ):
            raise DimensionMismatch("parameter row count must equal the class count")
        if not (np.all(np.isfinite(self.W)) and np.all(np.isfinite(self.b))):
            raise NonFiniteLoss("model parameters are not finite")

    @property
    def k(self) -> int:
        return self.W.shape[0]

    @property
    def d(self) -> int:
        return self.W.shape[1]


@dataclass(frozen=True)
class FitResult:
    model: SoftmaxModel
    losses: tuple[float, ...] = field(repr=False)
    iterations: int = 0
    converged: bool = False

    @property
    def final_loss(self) -> float:
        return self.losses[-1]


def softmax(z: np.ndarray) -> np.ndarray:
    """Numerically stable softmax of a logit vector."""
    z = np.asarray(z, dtype=np.float64)
    shifted = z - np.max(z)
    exp = np.exp(shifted)
    return exp / np.sum(exp)


def _log_probs(X: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise log-softmax of X W^T + b."""
    logits = X @ W.T + b
    shifted = logits - np.max(logits, axis=1, keepdims=True)
    lse = np.log(np.sum(np.exp(shifted), axis=1, keepdims=True))
    return shifted - lse


def _loss_grad(
    X: np.ndarray, y: np.ndarray, W: np.ndarray, b: np.ndarray, l2: float
) -> tuple[float, np.ndarray, np.ndarray]:
    n = X.shape[0]
    # Overflow is legal here: callers test the loss for finiteness and
    # either back off the step or raise NonFiniteLoss.
    with np.errstate(over="ignore", invalid="ignore"):
        logp = _log_probs(X, W, b)
        loss = -float(np.mean(logp[np.arange(n), y]))
        if l2 > 0:
            loss += l2 / (2.0 * n) * float(np.sum(W * W))
        delta = np.exp(logp)
        delta[np.arange(n), y] -= 1.0
        gW = delta.T @ X / n
        if l2 > 0:
            gW += (l2 / n) * W
        gb = np.sum(delta, axis=0) / n
    return loss, gW, gb


def loss_and_gradient(
    model: SoftmaxModel, dm: DesignMatrix, l2: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """Regularized cross-entropy loss and its analytic gradient."""
    if dm.d != model.d:
        raise DimensionMismatch(
            f"design matrix width {dm.d} != model width {model.d}"
        )
    if np.any(dm.y < 0) or np.any(dm.y >= model.k):
        raise DimensionMismatch("class codes outside 0..K-1")
    return _loss_grad(dm.X, dm.y, model.W, model.b, l2)


def fit(
    dm: DesignMatrix,
    hyper: Hyperparams = Hyperparams(),
    seed: int = 0,
    label_set: LabelSet | None = None,
) -> FitResult:
    """Full-batch gradient descent from zeros.

    The returned trace holds the loss before each step plus the final
    loss, so ``losses[0]`` is the zero-model loss (ln K when l2-free)
    and ``losses[-1]`` the fitted loss.  ``seed`` does not influence
    the deterministic solver; it is recorded by callers for provenance.
    """
    del seed
    label_set = label_set or LabelSet()
    if dm.n < 1:
        raise EmptyDataset("cannot fit on an empty design matrix")
    k = len(label_set)
    if np.any(dm.y < 0) or np.any(dm.y >= k):
        raise DimensionMismatch(f"class codes outside 0..{k - 1}")

    W = np.zeros((k, dm.d), dtype=np.float64)
    b = np.zeros(k, dtype=np.float64)
    loss, gW, gb = _loss_grad(dm.X, dm.y, W, b, hyper.l2)
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"initial loss is {loss!r}")
    losses = [loss]
    iterations = 0
    converged = False
    for _ in range(hyper.max_iter):
        grad_inf = max(float(np.max(np.abs(gW))), float(np.max(np.abs(gb))))
        if grad_inf < hyper.tol:
            converged = True
            break
        if hyper.backtracking:
            step = hyper.learning_rate
            accepted = False
            for _halving in range(MAX_HALVINGS + 1):
                new_W = W - step * gW
                new_b = b - step * gb
                new_loss, new_gW, new_gb = _loss_grad(
                    dm.X, dm.y, new_W, new_b, hyper.l2
                )
                if np.isfinite(new_loss) and new_loss < loss:
                    accepted = True
                    break
                step *= 0.5
            if not accepted:
                break
        else:
            new_W = W - hyper.learning_rate * gW
            new_b = b - hyper.learning_rate * gb
            new_loss, new_gW, new_gb = _loss_grad(dm.X, dm.y, new_W, new_b, hyper.l2)
            if not np.isfinite(new_loss):
                raise NonFiniteLoss(
                    f"loss became {new_loss!r} at iteration {iterations + 1}; "
                    "lower the learning rate or enable backtracking"
                )
        W, b = new_W, new_b
        loss, gW, gb = new_loss, new_gW, new_gb
        losses.append(loss)
        iterations += 1
    model = SoftmaxModel(
        W=W,
        b=b,
        label_set=label_set,
        feature_config=dm.feature_config,
        trained_hyper=hyper,
    )
    return FitResult(
        model=model,
        losses=tuple(losses),
        iterations=iterations,
        converged=converged,
    )


def model_to_json(result: FitResult) -> str:
    """Serialize a fitted model (with fit metadata) as JSON text.

    Floats are emitted via repr and parse back to identical float64
    values, so save/load round-trips bitwise.
    """
    model = result.model
    payload = {
        "labels": list(model.label_set.labels),
        "feature_config": model.feature_config.to_dict(),
        "d": model.d,
        "K": model.k,
        "W": [list(map(float, row)) for row in model.W],
        "b": list(map(float, model.b)),
        "trained_hyper": model.trained_hyper.to_dict(),
        "final_loss": result.final_loss,
        "iterations": result.iterations,
        "converged": result.converged,
    }
    return json.dumps(payload, indent=2) + "\n"


def model_from_json(content: str) -> FitResult:
    """Parse a model file written by model_to_json."""
    try:
        payload = json.loads(content)
        labels = tuple(payload["labels"])
        config = FeatureConfig.from_dict(payload["feature_config"])
        hyper = Hyperparams.from_dict(payload["trained_hyper"])
        W = np.array(payload["W"], dtype=np.float64)
        b = np.array(payload["b"], dtype=np.float64)
        final_loss = float(payload["final_loss"])
        iterations = int(payload["iterations"])
        converged = bool(payload.get("converged", False))
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise ModelError(f"malformed model file: {exc}") from None
    if W.ndim != 2 or W.shape != (payload["K"], payload["d"]):
        raise ModelError("model file W shape disagrees with declared K x d")
    model = SoftmaxModel(
        W=W,
        b=b,
        label_set=LabelSet(labels),
        feature_config=config,
        trained_hyper=hyper,
    )
    return FitResult(
        model=model,
        losses=(final_loss,),
        iterations=iterations,
        converged=converged,
    )


def predict_proba(model: SoftmaxModel, X: np.ndarray) -> np.ndarray:
    """Row-wise class probabilities; each row sums to 1."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.d:
        raise DimensionMismatch(
            f"input width {X.shape[1] if X.ndim == 2 else '?'} != model width {model.d}"
        )
    return np.exp(_log_probs(X, model.W, model.b))


def predict(model: SoftmaxModel, X: np.ndarray) -> np.ndarray:
    """Argmax class codes; ties break toward the lowest code."""
    return np.argmax(predict_proba(model, X), axis=1).astype(np.int64)
