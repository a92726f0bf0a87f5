"""The six benchmark predictors and their training protocols.

Monomial ridge models (fit in log space, penalty chosen by k-fold grid
search) and small feedforward networks (two 64-unit ReLU hidden layers,
linear output, Adam, fixed epoch budget, L2 penalty on weight matrices)
are paired with three feature reductions: dimensionless groups, PCA, and a
bottleneck autoencoder. Everything is seeded and deterministic; a given
(data, config, seed) triple always produces bit-identical results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import pi_engine
from .dataio import (
    Dataset,
    Standardizer,
    fit_array_standardizer,
    kfold_indices,
)
from .errors import DivergenceError, LogDomainError
from .metrics import ScoreSet, mae, mse, r_squared, score_all
from .numerics import pca_fit, ridge_solve

DEFAULT_LAMBDA_GRID = tuple(10.0**k for k in range(-6, 3))

REDUCTIONS = ("pi", "pca", "autoencoder")
MODELS = ("nn", "lr")

METHOD_NAMES = {
    ("pi", "nn"): "EnviroPiNet",
    ("pi", "lr"): "BP-LR",
    ("pca", "nn"): "PCA-NN",
    ("pca", "lr"): "PCA-LR",
    ("autoencoder", "nn"): "AE-NN",
    ("autoencoder", "lr"): "AE-LR",
}

METHOD_KEYS = {name: key for key, name in METHOD_NAMES.items()}

# Features shifted for the log transform are floored here at predict time;
# out-of-range inputs would otherwise leave the log domain.
SHIFT_FLOOR = 1e-2


# ---------------------------------------------------------------------------
# Monomial (power-law) ridge model


@dataclass(frozen=True)
class MonomialModel:
    """y = exp(intercept_log) * prod(x_i ** exponents_i)."""

    intercept_log: float
    exponents: tuple[float, ...]
    feature_names: tuple[str, ...]
    ridge_lambda: float

    def __post_init__(self):
        if len(self.exponents) != len(self.feature_names):
            raise ValueError("exponents and feature_names must align")

    def to_json(self) -> dict:
        return {
            "kind": "monomial",
            "intercept_log": self.intercept_log,
            "exponents": list(self.exponents),
            "feature_names": list(self.feature_names),
            "ridge_lambda": self.ridge_lambda,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MonomialModel":
        return cls(
            intercept_log=doc["intercept_log"],
            exponents=tuple(doc["exponents"]),
            feature_names=tuple(doc["feature_names"]),
            ridge_lambda=doc["ridge_lambda"],
        )


def _positive_log(X: np.ndarray, names) -> np.ndarray:
    bad = np.argwhere(X <= 0.0)
    if bad.size:
        i, j = bad[0]
        label = names[j] if names else f"feature {j}"
        raise LogDomainError(
            f"row {int(i)}, column {label!r}: value {X[i, j]!r} is not positive"
        )
    return np.log(X)


def _unpack_xy(features, target, feature_names):
    if isinstance(features, Dataset):
        data = features
        X = data.independents()
        y = data.dependent_values()
        names = data.schema.independent_names
    else:
        X = np.asarray(features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if target is None:
            raise ValueError("target required when features is a matrix")
        y = np.asarray(target, dtype=float).ravel()
        names = tuple(feature_names) if feature_names else tuple(
            f"x{i + 1}" for i in range(X.shape[1])
        )
    if X.shape[0] != y.shape[0]:
        raise ValueError("feature and target row counts differ")
    return X, y, names


def fit_monomial(
    features,
    target=None,
    *,
    feature_names=None,
    lambda_grid=DEFAULT_LAMBDA_GRID,
    k_folds: int = 5,
    seed: int = 0,
) -> MonomialModel:
    """Fit the power law by ridge regression on logs.

    ln(y) is regressed on ln(features) with an unpenalized intercept; the
    penalty is chosen from `lambda_grid` by minimizing mean k-fold
    validation MSE in log space (ties go to the smallest penalty), then the
    model is refit on all rows. Accepts a Dataset of dimensionless columns
    or a plain (features, target) pair.
    """
    X, y, names = _unpack_xy(features, target, feature_names)
    L = _positive_log(X, names)
    t = _positive_log(y.reshape(-1, 1), ("target",)).ravel()
    design = np.column_stack([np.ones(len(t)), L])
    grid = sorted(float(lam) for lam in lambda_grid)
    if not grid:
        raise ValueError("lambda_grid must not be empty")

    if len(grid) == 1:
        best_lambda = grid[0]
    else:
        folds = kfold_indices(len(t), k_folds, seed)
        best_lambda, best_score = None, None
        for lam in grid:
            fold_mse = []
            for val_idx in folds:
                mask = np.ones(len(t), dtype=bool)
                mask[val_idx] = False
                beta = ridge_solve(design[mask], t[mask], lam)
                resid = design[val_idx] @ beta - t[val_idx]
                fold_mse.append(float(np.mean(resid**2)))
            score = float(np.mean(fold_mse))
            if best_score is None or score < best_score:
                best_lambda, best_score = lam, score

    beta = ridge_solve(design, t, best_lambda)
    return MonomialModel(
        intercept_log=float(beta[0]),
        exponents=tuple(float(b) for b in beta[1:]),
        feature_names=names,
        ridge_lambda=best_lambda,
    )


def predict_monomial(model: MonomialModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    L = _positive_log(X, model.feature_names)
    return np.exp(model.intercept_log + L @ np.asarray(model.exponents))


# ---------------------------------------------------------------------------
# Feedforward network


@dataclass(frozen=True)
class MlpConfig:
    """Training protocol knobs; the defaults are the benchmark settings."""

    batch_size: int = 16
    learning_rate: float = 1e-4
    units_per_layer: int = 64
    hidden_layers: int = 2
    epochs: int = 50
    k_folds: int = 5
    l2_penalty: float = 0.01
    hidden_activation: str = "relu"
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4, 5, 6)

    def __post_init__(self):
        for name in ("batch_size", "units_per_layer", "hidden_layers", "epochs", "k_folds"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0 or self.l2_penalty < 0:
            raise ValueError("learning_rate must be positive, l2_penalty nonnegative")
        if self.hidden_activation != "relu":
            raise ValueError("only rectified-linear hidden activations are supported")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seeds must be distinct")

    def to_json(self) -> dict:
        return {
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "units_per_layer": self.units_per_layer,
            "hidden_layers": self.hidden_layers,
            "epochs": self.epochs,
            "k_folds": self.k_folds,
            "l2_penalty": self.l2_penalty,
            "hidden_activation": self.hidden_activation,
            "seeds": list(self.seeds),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MlpConfig":
        doc = dict(doc)
        if "seeds" in doc:
            doc["seeds"] = tuple(doc["seeds"])
        return cls(**doc)


@dataclass(frozen=True)
class MlpModel:
    """Fully-connected network; activation per layer is 'relu' or 'linear'."""

    layer_sizes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]
    activations: tuple[str, ...]
    input_standardizer: Standardizer | None = None

    def forward(self, X: np.ndarray) -> np.ndarray:
        if self.input_standardizer is not None:
            X = self.input_standardizer.transform(X)
        a = np.asarray(X, dtype=float)
        if a.ndim == 1:
            a = a.reshape(-1, 1)
        for W, b, act in zip(self.weights, self.biases, self.activations):
            z = a @ W + b
            a = np.maximum(z, 0.0) if act == "relu" else z
        return a

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = self.forward(X)
        return out.ravel() if out.shape[1] == 1 else out

    def to_json(self) -> dict:
        return {
            "kind": "mlp",
            "layer_sizes": list(self.layer_sizes),
            "activations": list(self.activations),
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "input_standardizer": (
                self.input_standardizer.to_json() if self.input_standardizer else None
            ),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "MlpModel":
        std = doc.get("input_standardizer")
        return cls(
            layer_sizes=tuple(doc["layer_sizes"]),
            weights=tuple(np.array(w, dtype=float) for w in doc["weights"]),
            biases=tuple(np.array(b, dtype=float) for b in doc["biases"]),
            activations=tuple(doc["activations"]),
            input_standardizer=Standardizer.from_json(std) if std else None,
        )


@dataclass(frozen=True)
class TrainReport:
    """Per-epoch fold curves plus cross-validated end-of-training metrics.

    Curve arrays have shape (k_folds, epochs) and hold the unregularized
    MSE/MAE, so curves are comparable across penalty settings.
    """

    seed: int
    fold_train_mse: np.ndarray
    fold_val_mse: np.ndarray
    fold_train_mae: np.ndarray
    fold_val_mae: np.ndarray
    fold_val_r2: np.ndarray
    final_val_mse: float
    final_val_mae: float
    final_val_r2: float

    def history_rows(self):
        """Yield (fold, epoch, train_mse, val_mse, train_mae, val_mae)."""
        k, epochs = self.fold_train_mse.shape
        for fold in range(k):
            for epoch in range(epochs):
                yield (
                    fold,
                    epoch + 1,
                    float(self.fold_train_mse[fold, epoch]),
                    float(self.fold_val_mse[fold, epoch]),
                    float(self.fold_train_mae[fold, epoch]),
                    float(self.fold_val_mae[fold, epoch]),
                )


def _init_layers(sizes, rng):
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _forward_pass(weights, biases, activations, X):
    pre, post = [], [X]
    a = X
    for W, b, act in zip(weights, biases, activations):
        z = a @ W + b
        pre.append(z)
        a = np.maximum(z, 0.0) if act == "relu" else z
        post.append(a)
    return pre, post


def mlp_loss(weights, biases, activations, X, Y, l2_penalty: float) -> float:
    """Training objective: mean squared error plus l2_penalty * sum(W**2)."""
    _, post = _forward_pass(weights, biases, activations, X)
    err = float(np.mean((post[-1] - Y) ** 2))
    return err + l2_penalty * sum(float(np.sum(W**2)) for W in weights)


def mlp_loss_and_grads(weights, biases, activations, X, Y, l2_penalty: float):
    """Objective value and its gradients w.r.t. every weight and bias.

    Biases are unpenalized; the MSE is averaged over all output entries.
    """
    pre, post = _forward_pass(weights, biases, activations, X)
    resid = post[-1] - Y
    mse_term = float(np.mean(resid**2))
    loss = mse_term + l2_penalty * sum(float(np.sum(W**2)) for W in weights)

    delta = 2.0 * resid / resid.size
    grad_w = [None] * len(weights)
    grad_b = [None] * len(biases)
    for i in range(len(weights) - 1, -1, -1):
        if activations[i] == "relu":
            delta = delta * (pre[i] > 0)
        grad_w[i] = post[i].T @ delta + 2.0 * l2_penalty * weights[i]
        grad_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ weights[i].T
    return loss, grad_w, grad_b


class _Adam:
    """Adam with the standard defaults (b1=0.9, b2=0.999, eps=1e-8)."""

    def __init__(self, params, lr):
        self.lr = lr
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - 0.9**self.t
        c2 = 1.0 - 0.999**self.t
        for i, (p, g) in enumerate(zip(params, grads)):
            self.m[i] = 0.9 * self.m[i] + 0.1 * g
            self.v[i] = 0.999 * self.v[i] + 0.001 * g * g
            p -= self.lr * (self.m[i] / c1) / (np.sqrt(self.v[i] / c2) + 1e-8)


def _epoch_metrics(weights, biases, activations, X, Y):
    _, post = _forward_pass(weights, biases, activations, X)
    resid = post[-1] - Y
    return float(np.mean(resid**2)), float(np.mean(np.abs(resid)))


def _train_network(X, Y, sizes, activations, config: MlpConfig, rng, val=None):
    """Mini-batch Adam over the fixed epoch budget.

    Returns (weights, biases, history) where history is an (epochs, 4)
    array of train/val MSE and MAE recorded after each epoch (val entries
    are NaN when no validation split is given).
    """
    weights, biases = _init_layers(sizes, rng)
    adam = _Adam(weights + biases, config.learning_rate)
    n = X.shape[0]
    history = np.full((config.epochs, 4), np.nan)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            _, gw, gb = mlp_loss_and_grads(
                weights, biases, activations, X[idx], Y[idx], config.l2_penalty
            )
            adam.step(weights + biases, gw + gb)
        train_mse, train_mae = _epoch_metrics(weights, biases, activations, X, Y)
        if not np.isfinite(train_mse):
            raise DivergenceError(epoch + 1)
        history[epoch, 0] = train_mse
        history[epoch, 2] = train_mae
        if val is not None:
            val_mse, val_mae = _epoch_metrics(weights, biases, activations, *val)
            if not np.isfinite(val_mse):
                raise DivergenceError(epoch + 1, "validation loss non-finite")
            history[epoch, 1] = val_mse
            history[epoch, 3] = val_mae
    return weights, biases, history


def _train_with_folds(X, Y, sizes, activations, config: MlpConfig, seed: int):
    """k-fold curves plus a final model refit on all rows."""
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    folds = kfold_indices(n, config.k_folds, seed)

    curves = np.zeros((config.k_folds, config.epochs, 4))
    val_r2 = np.zeros(config.k_folds)
    for f, val_idx in enumerate(folds):
        mask = np.ones(n, dtype=bool)
        mask[val_idx] = False
        weights, biases, hist = _train_network(
            X[mask], Y[mask], sizes, activations, config, rng, val=(X[val_idx], Y[val_idx])
        )
        curves[f] = hist
        _, post = _forward_pass(weights, biases, activations, X[val_idx])
        val_r2[f] = r_squared(Y[val_idx].ravel(), post[-1].ravel())

    weights, biases, _ = _train_network(X, Y, sizes, activations, config, rng)
    report = TrainReport(
        seed=seed,
        fold_train_mse=curves[:, :, 0],
        fold_val_mse=curves[:, :, 1],
        fold_train_mae=curves[:, :, 2],
        fold_val_mae=curves[:, :, 3],
        fold_val_r2=val_r2,
        final_val_mse=float(curves[:, -1, 1].mean()),
        final_val_mae=float(curves[:, -1, 3].mean()),
        final_val_r2=float(val_r2.mean()),
    )
    return weights, biases, report


def train_mlp(features, target=None, config: MlpConfig | None = None, seed: int = 0):
    """Train the regression network on standardized features.

    Runs the k-fold protocol for the learning curves, then refits on the
    full training set; returns (MlpModel, TrainReport). Deterministic per
    seed (weight init, batch shuffling and fold assignment are all seeded).
    """
    config = config or MlpConfig()
    if isinstance(features, Dataset):
        target = features.dependent_values()
        features = features.independents()
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    Y = np.asarray(target, dtype=float).reshape(-1, 1)
    sizes = [X.shape[1]] + [config.units_per_layer] * config.hidden_layers + [1]
    activations = tuple(["relu"] * config.hidden_layers + ["linear"])
    weights, biases, report = _train_with_folds(X, Y, sizes, activations, config, seed)
    model = MlpModel(
        layer_sizes=tuple(sizes),
        weights=tuple(weights),
        biases=tuple(biases),
        activations=activations,
    )
    return model, report


def train_autoencoder(
    X, config: MlpConfig | None = None, seed: int = 0, code_dim: int = 4
):
    """Train the bottleneck autoencoder on standardized inputs.

    Architecture: d -> units -> code_dim -> units -> d with ReLU hidden
    layers and linear code/output layers, trained to minimize
    reconstruction MSE under the same optimizer/epochs/penalty contract as
    the regression network. Returns (encoder, decoder, TrainReport); the
    encoder emits the latent columns.
    """
    config = config or MlpConfig()
    X = np.asarray(X, dtype=float)
    sizes = [X.shape[1], config.units_per_layer, code_dim, config.units_per_layer, X.shape[1]]
    activations = ("relu", "linear", "relu", "linear")
    weights, biases, report = _train_with_folds(X, X, sizes, activations, config, seed)
    encoder = MlpModel(
        layer_sizes=tuple(sizes[:3]),
        weights=tuple(weights[:2]),
        biases=tuple(biases[:2]),
        activations=activations[:2],
    )
    decoder = MlpModel(
        layer_sizes=tuple(sizes[2:]),
        weights=tuple(weights[2:]),
        biases=tuple(biases[2:]),
        activations=activations[2:],
    )
    return encoder, decoder, report


# ---------------------------------------------------------------------------
# PCA reducer


@dataclass(frozen=True)
class PcaReducer:
    """Frozen principal components; transform projects onto them."""

    components: np.ndarray
    means: np.ndarray
    explained_variance: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.means) @ self.components.T

    def to_json(self) -> dict:
        return {
            "components": self.components.tolist(),
            "means": self.means.tolist(),
            "explained_variance": self.explained_variance.tolist(),
        }


def fit_pca_reducer(X, k: int = 4) -> PcaReducer:
    components, means, variance = pca_fit(X, k)
    return PcaReducer(components=components, means=means, explained_variance=variance)


def reduce_pca4(X) -> np.ndarray:
    """Project X onto its own first four principal components."""
    return fit_pca_reducer(X, k=4).transform(X)


# ---------------------------------------------------------------------------
# Experiment runner


@dataclass(frozen=True)
class SeedResult:
    """Everything one (method, seed) run produced."""

    seed: int
    train_scores: ScoreSet
    test_scores: ScoreSet
    train_predictions: np.ndarray
    test_predictions: np.ndarray
    extra_scores: dict = field(default_factory=dict)
    train_report: TrainReport | None = None
    reducer_report: TrainReport | None = None
    artifacts: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ComparisonRow:
    """Seed-averaged benchmark scores for one method."""

    method: str
    reduction: str
    model: str
    seeds: tuple[int, ...]
    train_r2: float
    test_r2: float
    train_smape: float
    test_smape: float
    seed_results: tuple[SeedResult, ...]
    y_train: np.ndarray
    y_test: np.ndarray

    def mean_test_predictions(self) -> np.ndarray:
        return np.mean([r.test_predictions for r in self.seed_results], axis=0)


def _shifted_features(F_train: np.ndarray, F_eval: np.ndarray):
    """Shift reduced features into the log domain using training minima.

    Fit-time features come out >= 1 by construction; evaluation features
    from outside the training range are floored at SHIFT_FLOOR so the power
    law stays evaluable (documented stand-in for inputs that leave the
    training envelope).
    """
    shift = F_train.min(axis=0)
    train = F_train - shift + 1.0
    evaluated = np.maximum(F_eval - shift + 1.0, SHIFT_FLOOR)
    return train, evaluated, shift


def _fit_predictor(model_kind, F_train, y_train, F_test, feature_names, config,
                   lambda_grid, seed, shift_features=False):
    """Fit nn or lr on reduced features; returns predictions and artifacts.

    `shift_features` moves features into the log domain first; it is used
    for PCA/latent features, which can be negative, never for group
    features (the power law applies to those directly).
    """
    if model_kind == "lr":
        artifacts = {}
        if shift_features:
            train_feats, test_feats, shift = _shifted_features(F_train, F_test)
            artifacts["feature_shift"] = shift.tolist()
        else:
            train_feats, test_feats = F_train, F_test
        mono = fit_monomial(
            train_feats,
            y_train,
            feature_names=feature_names,
            lambda_grid=lambda_grid,
            k_folds=config.k_folds,
            seed=seed,
        )
        pred_train = predict_monomial(mono, train_feats)
        pred_test = predict_monomial(mono, test_feats)
        artifacts["monomial"] = mono.to_json()
        return pred_train, pred_test, None, artifacts

    feat_std = fit_array_standardizer(F_train, on_constant="zero")
    mlp, report = train_mlp(feat_std.transform(F_train), y_train, config, seed)
    mlp = replace(mlp, input_standardizer=feat_std)
    pred_train = mlp.predict(F_train)
    pred_test = mlp.predict(F_test)
    return pred_train, pred_test, report, {"mlp": mlp.to_json()}


def _run_seed_pi(model_kind, train, test, basis, config, lambda_grid, seed) -> SeedResult:
    pi_train = pi_engine.nondimensionalize(train, basis)
    pi_test = pi_engine.nondimensionalize(test, basis)
    labels = tuple(g.label for g in basis.groups)
    U_train, y_train_pi = pi_train.independents(), pi_train.dependent_values()
    U_test, y_test_pi = pi_test.independents(), pi_test.dependent_values()

    pred_train_pi, pred_test_pi, report, artifacts = _fit_predictor(
        model_kind, U_train, y_train_pi, U_test, labels, config, lambda_grid, seed,
        shift_features=False,
    )

    pred_train = pi_engine.dimensionalize_target(pred_train_pi, train, basis)
    pred_test = pi_engine.dimensionalize_target(pred_test_pi, test, basis)
    artifacts["basis"] = basis.to_json()
    return SeedResult(
        seed=seed,
        train_scores=score_all(train.dependent_values(), pred_train),
        test_scores=score_all(test.dependent_values(), pred_test),
        train_predictions=pred_train,
        test_predictions=pred_test,
        extra_scores={
            "train_pi": score_all(y_train_pi, pred_train_pi).to_json(),
            "test_pi": score_all(y_test_pi, pred_test_pi).to_json(),
        },
        train_report=report,
        artifacts=artifacts,
    )


def _run_seed_datadriven(reduction, model_kind, train, test, config, lambda_grid,
                         seed, n_components) -> SeedResult:
    raw_names = train.schema.independent_names
    X_train_raw = train.matrix(raw_names)
    X_test_raw = test.matrix(raw_names)
    raw_std = fit_array_standardizer(X_train_raw, on_constant="zero")
    Z_train = raw_std.transform(X_train_raw)
    Z_test = raw_std.transform(X_test_raw)

    reducer_report = None
    if reduction == "pca":
        reducer = fit_pca_reducer(Z_train, k=n_components)
        F_train = reducer.transform(Z_train)
        F_test = reducer.transform(Z_test)
        names = tuple(f"PCA{i + 1}" for i in range(n_components))
        reducer_artifacts = {"pca": reducer.to_json()}
    else:
        encoder, _, reducer_report = train_autoencoder(
            Z_train, config, seed, code_dim=n_components
        )
        F_train = encoder.forward(Z_train)
        F_test = encoder.forward(Z_test)
        names = tuple(f"h{i + 1}" for i in range(n_components))
        reducer_artifacts = {"encoder": encoder.to_json()}

    y_train = train.dependent_values()
    pred_train, pred_test, report, artifacts = _fit_predictor(
        model_kind, F_train, y_train, F_test, names, config, lambda_grid, seed,
        shift_features=True,
    )
    artifacts.update(reducer_artifacts)
    artifacts["raw_standardizer"] = raw_std.to_json()
    return SeedResult(
        seed=seed,
        train_scores=score_all(y_train, pred_train),
        test_scores=score_all(test.dependent_values(), pred_test),
        train_predictions=pred_train,
        test_predictions=pred_test,
        train_report=report,
        reducer_report=reducer_report,
        artifacts=artifacts,
    )


def run_experiment(
    reduction: str,
    model: str,
    train: Dataset,
    test: Dataset,
    config: MlpConfig | None = None,
    seeds=None,
    lambda_grid=DEFAULT_LAMBDA_GRID,
    base_subset=None,
    n_components: int = 4,
) -> ComparisonRow:
    """Benchmark one reduction+model combination over a list of seeds.

    Per seed: reduce the features (fit on training data only), fit the
    predictor, predict on both splits, and score on the dimensional target
    (group-space predictions are converted back through the target group so
    every method is scored on the same scale). Reported numbers are means
    over seeds.
    """
    if reduction not in REDUCTIONS or model not in MODELS:
        raise ValueError(
            f"invalid combination ({reduction!r}, {model!r}); "
            f"reductions {REDUCTIONS}, models {MODELS}"
        )
    config = config or MlpConfig()
    seeds = tuple(seeds) if seeds is not None else config.seeds

    basis = None
    if reduction == "pi":
        subset = base_subset or train.schema.preferred_base
        if subset is None:
            subset = pi_engine.select_base_subset(train.schema)
        basis = pi_engine.derive_pi_basis(train.schema, subset)

    results = []
    for seed in seeds:
        if reduction == "pi":
            results.append(
                _run_seed_pi(model, train, test, basis, config, lambda_grid, seed)
            )
        else:
            results.append(
                _run_seed_datadriven(
                    reduction, model, train, test, config, lambda_grid, seed, n_components
                )
            )

    return ComparisonRow(
        method=METHOD_NAMES[(reduction, model)],
        reduction=reduction,
        model=model,
        seeds=seeds,
        train_r2=float(np.mean([r.train_scores.r2 for r in results])),
        test_r2=float(np.mean([r.test_scores.r2 for r in results])),
        train_smape=float(np.mean([r.train_scores.smape for r in results])),
        test_smape=float(np.mean([r.test_scores.smape for r in results])),
        seed_results=tuple(results),
        y_train=train.dependent_values(),
        y_test=test.dependent_values(),
    )


# ---------------------------------------------------------------------------
# Model persistence


def save_model(model, path: str | Path) -> None:
    """Write a model as versioned JSON; loading reproduces predictions."""
    doc = {"format": "pireduce-model", "version": 1}
    doc.update(model.to_json())
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    kind = doc.get("kind")
    if kind == "monomial":
        return MonomialModel.from_json(doc)
    if kind == "mlp":
        return MlpModel.from_json(doc)
    raise ValueError(f"unknown model kind {kind!r}")
