"""
Central finite differences: the oracle the analytic gradients are checked against.
"""
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np

from ..errors import ContractError, NumericError
from .tensor import Tensor

Objective = Callable[[], Union[float, Tensor]]


def _evaluate(f: Objective) -> float:
    value = f()
    if isinstance(value, Tensor):
        value = value.item()
    value = float(value)
    if not np.isfinite(value):
        raise NumericError(f"objective returned a non-finite value: {value}")
    return value


def _central_difference(f: Objective, flat: np.ndarray, i: int, epsilon: float) -> float:
    original = flat[i]
    flat[i] = original + epsilon
    f_plus = _evaluate(f)
    flat[i] = original - epsilon
    f_minus = _evaluate(f)
    flat[i] = original
    return (f_plus - f_minus) / (2.0 * epsilon)


def _check_epsilon(epsilon: float) -> None:
    if epsilon <= 0:
        raise ContractError(f"epsilon must be positive, got {epsilon}")


def finite_difference_gradient(
    f: Objective,
    params: Sequence[Tensor],
    epsilon: float = 1e-5,
) -> Dict[int, np.ndarray]:
    """
    Numerical gradient of a scalar objective by central differences.

    Each coordinate of each parameter is perturbed in place by ±epsilon and
    restored afterwards; `f` must read the parameters' current data.

    Args:
        f: Zero-argument callable returning a float or a scalar tensor
        params: Tensors to differentiate with respect to
        epsilon: Perturbation size (> 0)

    Returns:
        Map of parameter uid → gradient array
    """
    _check_epsilon(epsilon)
    gradients: Dict[int, np.ndarray] = {}
    for param in params:
        flat = param.data.reshape(-1)
        grad = np.array([_central_difference(f, flat, i, epsilon) for i in range(flat.size)], dtype=np.float64)
        gradients[param.uid] = grad.reshape(param.shape)
    return gradients


def sampled_finite_difference(
    f: Objective,
    params: Sequence[Tensor],
    coordinates: int,
    rng: np.random.Generator,
    epsilon: float = 1e-5,
) -> Dict[int, Tuple[np.ndarray, np.ndarray]]:
    """
    Central differences at up to `coordinates` random entries per parameter.

    Returns:
        Map of parameter uid → (flat indices, numerical partial derivatives)
    """
    _check_epsilon(epsilon)
    if coordinates < 1:
        raise ContractError(f"coordinates must be positive, got {coordinates}")
    sampled: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
    for param in params:
        flat = param.data.reshape(-1)
        picks = np.sort(rng.choice(flat.size, size=min(coordinates, flat.size), replace=False))
        values = np.array([_central_difference(f, flat, int(i), epsilon) for i in picks], dtype=np.float64)
        sampled[param.uid] = (picks, values)
    return sampled


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-7) -> float:
    """‖a − n‖ / max(‖a‖, ‖n‖); the absolute error when both norms are below `floor`."""
    analytic = np.asarray(analytic, dtype=np.float64)
    numeric = np.asarray(numeric, dtype=np.float64)
    if analytic.shape != numeric.shape:
        raise ContractError(f"gradient shapes differ: {analytic.shape} vs {numeric.shape}")
    diff = float(np.linalg.norm(analytic - numeric))
    scale = float(max(np.linalg.norm(analytic), np.linalg.norm(numeric)))
    if scale < floor:
        return diff
    return diff / scale


def max_relative_error(
    analytic: Dict[int, np.ndarray],
    numeric: Dict[int, np.ndarray],
) -> float:
    """Largest per-parameter relative error; a parameter missing from `analytic` counts as zero gradient."""
    worst = 0.0
    for uid, num in numeric.items():
        ana = analytic.get(uid, np.zeros_like(num))
        worst = max(worst, relative_error(ana, num))
    return worst


def max_sampled_relative_error(
    analytic: Dict[int, np.ndarray],
    sampled: Dict[int, Tuple[np.ndarray, np.ndarray]],
) -> float:
    """`max_relative_error` restricted to the coordinates that were sampled."""
    worst = 0.0
    for uid, (picks, num) in sampled.items():
        ana = analytic[uid].reshape(-1)[picks] if uid in analytic else np.zeros_like(num)
        worst = max(worst, relative_error(ana, num))
    return worst
