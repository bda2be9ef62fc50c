"""
Gradient-check suite: analytic gradients against central finite differences
for every tensor op, one GRU cell, and the full model losses at toy sizes.
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .. import autodiff as ad
from ..autodiff import (
    Tensor,
    backward,
    finite_difference_gradient,
    max_relative_error,
    max_sampled_relative_error,
    sampled_finite_difference,
)
from ..utils.logging import get_logger
from .layers import GRULayer
from .losses import label_loss, mask_weights, weighted_squared_error
from .models import ModelConfig, build_baseline_model, build_finetune_model, build_pretrain_model

logger = get_logger("nn.diagnostics")

TOY_CONFIG = ModelConfig(feature_dim=5, hidden_dim=7, num_gru_layers=2, num_labels=6)
TOY_STEPS = 6
TOY_MASK = 3
DEFAULT_TOLERANCE = 1e-4
MODEL_COORDINATES = 10
# Whole-model cases with many parameters; checked at sampled coordinates
SAMPLED_CASES = frozenset({"pretrain_masked_loss", "pretrain_full_loss", "baseline_label_loss"})


@dataclass
class GradcheckResult:
    name: str
    trials: int
    max_relative_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_relative_error)) and self.max_relative_error < self.tolerance


# A case builds (objective, params) from a generator; the objective rebuilds the graph on every call
Case = Callable[[np.random.Generator], Tuple[Callable[[], Tensor], Sequence[Tensor]]]


def _param(rng: np.random.Generator, shape) -> Tensor:
    return Tensor(rng.uniform(-1.0, 1.0, size=shape), requires_grad=True)


def _projected(rng: np.random.Generator, fn: Callable[..., Tensor], shapes) -> Tuple[Callable[[], Tensor], List[Tensor]]:
    """Scalarize an op as sum(op(...) ⊙ R) with a fixed random R."""
    params = [_param(rng, s) for s in shapes]
    projection = {}

    def objective() -> Tensor:
        out = fn(*params)
        if "R" not in projection:
            projection["R"] = Tensor(rng.uniform(-1.0, 1.0, size=out.shape))
        return ad.sum_all(ad.mul(out, projection["R"]))

    return objective, params


def _op_cases() -> Dict[str, Case]:
    return {
        "matmul": lambda rng: _projected(rng, ad.matmul, [(3, 4), (4, 2)]),
        "add": lambda rng: _projected(rng, ad.add, [(3, 4), (3, 4)]),
        "sub": lambda rng: _projected(rng, ad.sub, [(3, 4), (3, 4)]),
        "mul": lambda rng: _projected(rng, ad.mul, [(3, 4), (3, 4)]),
        "scalar_sub": lambda rng: _projected(rng, lambda a: ad.sub(1.0, a), [(5,)]),
        "sigmoid": lambda rng: _projected(rng, ad.sigmoid, [(3, 4)]),
        "tanh": lambda rng: _projected(rng, ad.tanh, [(3, 4)]),
        "add_bias": lambda rng: _projected(rng, ad.add_bias, [(3, 4), (4,)]),
        "stack": lambda rng: _projected(rng, lambda a, b: ad.stack([a, b], axis=1), [(3, 4), (3, 4)]),
        "reshape": lambda rng: _projected(rng, lambda a: ad.reshape(a, (4, 3)), [(3, 4)]),
    }


def _gru_cell_case(rng: np.random.Generator):
    layer = GRULayer("gru", TOY_CONFIG.feature_dim, TOY_CONFIG.hidden_dim, rng)
    x = Tensor(rng.uniform(-1.0, 1.0, size=TOY_CONFIG.feature_dim))
    h = Tensor(rng.uniform(-1.0, 1.0, size=TOY_CONFIG.hidden_dim))
    return (lambda: ad.sum_all(layer.step(x, h))), layer.parameters()


def _toy_sequence(rng: np.random.Generator, batch: int = 2) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=(batch, TOY_STEPS, TOY_CONFIG.feature_dim))


def _reconstruction_case(mode: str) -> Case:
    def case(rng: np.random.Generator):
        model = build_pretrain_model(TOY_CONFIG, seed=int(rng.integers(2**31)))
        original = _toy_sequence(rng)
        starts = rng.integers(0, TOY_STEPS - TOY_MASK + 1, size=original.shape[0])
        masked = original.copy()
        for b, s in enumerate(starts):
            masked[b, s:s + TOY_MASK, :] = -30.0
        weights = mask_weights(original.shape, starts, TOY_MASK, mode)
        return (lambda: weighted_squared_error(model.reconstruct(masked), original, weights)), model.parameters()

    return case


def _head_case(rng: np.random.Generator):
    pretrained = build_pretrain_model(TOY_CONFIG, seed=int(rng.integers(2**31)))
    model = build_finetune_model(pretrained, seed=int(rng.integers(2**31)))
    batch = _toy_sequence(rng)
    labels = rng.uniform(0.0, 3.0, size=(batch.shape[0], TOY_CONFIG.num_labels))
    return (lambda: label_loss(model.predict_batch(batch), labels)), model.parameters(trainable_only=True)


def _baseline_case(rng: np.random.Generator):
    model = build_baseline_model(TOY_CONFIG, seed=int(rng.integers(2**31)), pooling="mean")
    batch = _toy_sequence(rng)
    labels = rng.uniform(0.0, 3.0, size=(batch.shape[0], TOY_CONFIG.num_labels))
    return (lambda: label_loss(model.predict_batch(batch), labels)), model.parameters()


def all_cases() -> Dict[str, Case]:
    cases = _op_cases()
    cases.update({
        "gru_cell": _gru_cell_case,
        "pretrain_masked_loss": _reconstruction_case("masked"),
        "pretrain_full_loss": _reconstruction_case("full"),
        "finetune_head_loss": _head_case,
        "baseline_label_loss": _baseline_case,
    })
    return cases


def check_case(
    name: str,
    case: Case,
    seed: int,
    trials: int,
    tolerance: float = DEFAULT_TOLERANCE,
    coordinates: Optional[int] = None,
) -> GradcheckResult:
    """
    Run `trials` independent draws of one case.

    With `coordinates`, each parameter is checked at that many random entries
    instead of every entry.
    """
    worst = 0.0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        objective, params = case(rng)
        analytic = backward(objective())
        if coordinates is None:
            error = max_relative_error(analytic, finite_difference_gradient(objective, params))
        else:
            sampled = sampled_finite_difference(objective, params, coordinates, rng)
            error = max_sampled_relative_error(analytic, sampled)
        worst = max(worst, error)
    result = GradcheckResult(name=name, trials=trials, max_relative_error=worst, tolerance=tolerance)
    logger.info("gradcheck_case", name=name, trials=trials, max_relative_error=worst, passed=result.passed)
    return result


def run_gradcheck_suite(
    seed: int = 0,
    op_trials: int = 100,
    model_trials: int = 20,
    tolerance: float = DEFAULT_TOLERANCE,
    coordinates: int = MODEL_COORDINATES,
) -> List[GradcheckResult]:
    """Check every case; op cases run `op_trials` times, model cases `model_trials` times."""
    ops = _op_cases()
    results = []
    for name, case in all_cases().items():
        trials = op_trials if name in ops else model_trials
        sampled = coordinates if name in SAMPLED_CASES else None
        results.append(check_case(name, case, seed, trials, tolerance, sampled))
    return results
