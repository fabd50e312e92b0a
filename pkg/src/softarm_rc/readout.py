"""Linear readout trained by ridge regression."""

import csv
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ContractError, RankDeficiencyError

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA = 1e-8


@dataclass
class ReadoutWeights:
    """``w_out`` has the bias weight first; 2-D when trained on several targets at once."""

    w_out: np.ndarray
    ridge: float

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("index", "weight"))
            for i, w in enumerate(np.atleast_1d(self.w_out)):
                writer.writerow((i, repr(float(w))))


def train_ridge(X, y, ridge=DEFAULT_LAMBDA):
    """Solve ``(X^T X + ridge I) w = X^T y``.

    The bias column is penalised like every other node. ``y`` may hold
    several targets as columns; they share one factorisation.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or y.shape[0] != X.shape[0]:
        raise ContractError(f"X {X.shape} and targets {y.shape} do not align")
    if ridge < 0:
        raise ContractError(f"ridge parameter must be >= 0, got {ridge!r}")
    gram = X.T @ X
    rhs = X.T @ y
    if ridge == 0.0:
        rank = np.linalg.matrix_rank(X)
        if rank < X.shape[1]:
            raise RankDeficiencyError(
                f"design matrix has rank {rank} < {X.shape[1]} columns; use a ridge parameter > 0")
    gram[np.diag_indices_from(gram)] += ridge
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=True)
        w = scipy.linalg.cho_solve(factor, rhs)
    except np.linalg.LinAlgError:
        if ridge == 0.0:
            raise RankDeficiencyError("normal equations are singular; use a ridge parameter > 0")
        logger.info("Cholesky failed at ridge=%g; using eigenvalue-clipped solve", ridge)
        w = _clipped_solve(gram, rhs)
    return ReadoutWeights(w, float(ridge))


def _clipped_solve(gram, rhs):
    evals, evecs = np.linalg.eigh(gram)
    floor = max(evals.max(), 0.0) * gram.shape[0] * np.finfo(float).eps
    inv = np.where(evals > floor, 1.0 / np.maximum(evals, floor), 0.0)
    return evecs @ (inv[:, None] * (evecs.T @ rhs.reshape(gram.shape[0], -1))).reshape(rhs.shape)


def predict(weights, X):
    """``y_k = w_out . x_k`` for every row of ``X``."""
    w = weights.w_out if isinstance(weights, ReadoutWeights) else np.asarray(weights, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != w.shape[0]:
        raise ContractError(f"{X.shape[-1]} node columns but {w.shape[0]} readout weights")
    return X @ w


@dataclass
class OutputSeries:
    """Readout output over the training and evaluation phases (washout dropped)."""

    y: np.ndarray
    target: np.ndarray
    n_train: int

    @property
    def train(self):
        return slice(0, self.n_train)

    @property
    def eval(self):
        return slice(self.n_train, self.y.shape[0])

    @property
    def phases(self):
        return np.array(["train"] * self.n_train + ["eval"] * (self.y.shape[0] - self.n_train))


def fit_readout(nodes, target, ridge=DEFAULT_LAMBDA):
    """Train on the training rows of ``nodes`` and run the readout over train + eval.

    ``target`` is aligned with the full (washout-included) step index.
    """
    target = np.asarray(target, dtype=float)
    split = nodes.split
    weights = train_ridge(nodes.train, target[split.train_slice], ridge)
    rows = slice(split.washout, split.total)
    return weights, OutputSeries(predict(weights, nodes.X[rows]), target[rows], split.train)
