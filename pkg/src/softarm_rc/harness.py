"""Input generation, arm driving and node-matrix assembly for one trial."""

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from .arm import N_FRAGMENTS, ArmParams, simulate_response
from .arm.dynamics import H_MAX
from .errors import ContractError, SoftArmError
from .prng import Xoshiro256StarStar, derive_seed

logger = logging.getLogger(__name__)

DEGENERATE_STD = 1e-10


@dataclass(frozen=True)
class PhaseSplit:
    washout: int = 500
    train: int = 2000
    eval: int = 2500

    def __post_init__(self):
        for name in ("washout", "train", "eval"):
            value = getattr(self, name)
            if not (isinstance(value, (int, np.integer)) and value > 0):
                raise ContractError(f"PhaseSplit.{name} must be a positive integer, got {value!r}")

    @property
    def total(self):
        return self.washout + self.train + self.eval

    @property
    def train_slice(self):
        return slice(self.washout, self.washout + self.train)

    @property
    def eval_slice(self):
        return slice(self.washout + self.train, self.total)


PAPER_SPLIT = PhaseSplit(500, 2000, 2500)
DESK_SPLIT = PhaseSplit(200, 1000, 1000)


@dataclass(frozen=True)
class InputStream:
    values: np.ndarray
    tau: float
    seed: int

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class InputWeights:
    w: np.ndarray
    amplitude: float
    seed: int


def generate_input(seed, length, tau):
    """I.i.d. uniform [0, 1) inputs from the xoshiro256** stream of ``seed``."""
    if length <= 0:
        raise ContractError(f"input length must be positive, got {length}")
    values = Xoshiro256StarStar(seed).uniform(int(length))
    return InputStream(values, float(tau), int(seed))


def generate_weights(seed, amplitude):
    """Three independent uniform draws from [0, amplitude)."""
    if not amplitude > 0:
        raise ContractError(f"amplitude must be positive, got {amplitude!r}")
    w = Xoshiro256StarStar(seed).uniform(3, 0.0, float(amplitude))
    return InputWeights(w, float(amplitude), int(seed))


@dataclass
class NodeMatrix:
    """Design matrix ``X`` (K, 1 + n_nodes); column 0 is the constant bias node.

    Node ``1 + sensor * n_fragments + fragment`` holds sensor ``sensor``
    (s1x, s1y, ..., s3z) sampled at the end of fragment ``fragment``
    (0-based) of each step. ``mean``/``std`` are the training-phase
    statistics used for z-scoring (None when not normalised).
    """

    X: np.ndarray
    split: PhaseSplit
    mean: np.ndarray | None = None
    std: np.ndarray | None = None
    degenerate: list = field(default_factory=list)

    @property
    def train(self):
        return self.X[self.split.train_slice]

    @property
    def eval(self):
        return self.X[self.split.eval_slice]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["k"] + [f"x{i}" for i in range(self.X.shape[1])])
            for k, row in enumerate(self.X):
                writer.writerow([k] + [repr(float(x)) for x in row])


def node_index(sensor, fragment, n_fragments=N_FRAGMENTS):
    return 1 + sensor * n_fragments + fragment


def build_node_matrix(trace, split, normalize=True):
    """Flatten a (K, fragments, sensors) trace into a sensor-major node matrix.

    With ``normalize`` the node columns are z-scored using training-phase
    statistics only. Columns whose training-phase spread is below
    ``DEGENERATE_STD`` carry no signal; they are mean-centred (left at 0)
    and listed in ``NodeMatrix.degenerate``.
    """
    data = np.asarray(getattr(trace, "data", trace), dtype=float)
    if data.ndim != 3:
        raise ContractError("trace must have shape (steps, fragments, sensors)")
    K, n_frag, n_sens = data.shape
    if K != split.total:
        raise ContractError(f"trace has {K} steps but the phase split needs {split.total}")
    nodes = data.transpose(0, 2, 1).reshape(K, n_sens * n_frag)
    mean = std = None
    degenerate = []
    if normalize:
        train = nodes[split.train_slice]
        mean = train.mean(axis=0)
        std = train.std(axis=0)
        degenerate = [int(i) + 1 for i in np.flatnonzero(std <= DEGENERATE_STD)]
        safe = np.where(std > DEGENERATE_STD, std, np.inf)
        nodes = (nodes - mean) / safe
        if degenerate:
            logger.info("%d node column(s) constant over the training phase", len(degenerate))
    X = np.empty((K, nodes.shape[1] + 1))
    X[:, 0] = 1.0
    X[:, 1:] = nodes
    if not np.all(np.isfinite(X)):
        raise ContractError("node matrix contains non-finite values")
    return NodeMatrix(X, split, mean, std, degenerate)


def delay_line_nodes(inputs, delay, split):
    """Debug reservoir whose single node echoes the input ``delay`` steps late."""
    u = np.asarray(getattr(inputs, "values", inputs), dtype=float)
    echo = np.zeros_like(u)
    echo[delay:] = u[:u.size - delay]
    return build_node_matrix(echo[:, None, None], split, normalize=True)


@dataclass(frozen=True)
class TrialConfig:
    """Everything one reservoir run depends on.

    ``backend`` is ``"arm"`` for the simulated arm or ``"delay"`` for the
    delay-line debug reservoir (echo of the input ``delay`` steps back).
    """

    amplitude: float
    tau: float
    input_seed: int
    weight_seed: int
    arm: ArmParams = field(default_factory=ArmParams)
    split: PhaseSplit = PAPER_SPLIT
    normalize: bool = True
    h_max: float = H_MAX
    backend: str = "arm"
    delay: int = 3

    @classmethod
    def from_trial_seed(cls, seed, amplitude, tau, **kwargs):
        """Inputs and weights get separate streams derived from one trial seed."""
        return cls(amplitude, tau, derive_seed(seed, 0), derive_seed(seed, 1), **kwargs)


@dataclass
class TrialResult:
    config: TrialConfig
    inputs: InputStream
    weights: InputWeights
    nodes: NodeMatrix


class TrialError(SoftArmError):
    def __init__(self, message, config, cause):
        super().__init__(message)
        self.config = config
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)


def run_trial(config):
    """Generate inputs and weights, drive the reservoir, and assemble its nodes."""
    inputs = generate_input(config.input_seed, config.split.total, config.tau)
    weights = generate_weights(config.weight_seed, config.amplitude)
    if config.backend == "delay":
        nodes = delay_line_nodes(inputs, config.delay, config.split)
    elif config.backend == "arm":
        try:
            trace = simulate_response(inputs, weights.w, config.arm, config.tau, h_max=config.h_max)
        except SoftArmError as exc:
            raise TrialError(
                f"trial (input seed {config.input_seed}, weight seed {config.weight_seed}): {exc}",
                config, exc) from exc
        nodes = build_node_matrix(trace, config.split, config.normalize)
    else:
        raise ContractError(f"unknown backend {config.backend!r}")
    return TrialResult(config, inputs, weights, nodes)
