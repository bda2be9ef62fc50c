"""
Adam optimizer over Tensor parameters.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, List

import numpy as np

from ..errors import ContractError, DimensionError
from .tensor import Tensor


@dataclass
class OptimizerState:
    """First/second moment accumulators keyed by parameter uid, plus the step counter."""
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    first_moment: Dict[int, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[int, np.ndarray] = field(default_factory=dict)


class Adam:
    """
    Adam with bias correction.

    Only parameters with requires_grad=True are ever written; frozen
    parameters keep their exact bytes. Updates assign fresh arrays so graphs
    built before the step keep seeing the values they were built with.
    """

    def __init__(
        self,
        params: Iterable[Tensor],
        learning_rate: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        epsilon: float = 1e-8,
    ):
        self.params: List[Tensor] = list(params)
        self.state = OptimizerState(
            learning_rate=learning_rate, beta1=beta1, beta2=beta2, epsilon=epsilon
        )
        for p in self.params:
            if p.requires_grad:
                self.state.first_moment[p.uid] = np.zeros_like(p.data)
                self.state.second_moment[p.uid] = np.zeros_like(p.data)

    @property
    def trainable(self) -> List[Tensor]:
        return [p for p in self.params if p.requires_grad]

    def step(self, grads: Dict[int, np.ndarray]) -> None:
        """
        Apply one update.

        Args:
            grads: Map of parameter uid → gradient, as returned by `backward`.
                A trainable parameter without an entry receives a zero gradient.
        """
        trainable = self.trainable
        known = {p.uid for p in self.params}
        for uid in grads:
            if uid not in known:
                raise ContractError(f"gradient for unknown parameter uid {uid}")

        for p in trainable:
            g = grads.get(p.uid)
            if g is not None and np.shape(g) != p.shape:
                raise DimensionError(f"gradient shape mismatch for {p.name or p.uid}", np.shape(g), p.shape)

        state = self.state
        state.step += 1
        b1, b2 = state.beta1, state.beta2
        correction1 = 1.0 - b1 ** state.step
        correction2 = 1.0 - b2 ** state.step

        for p in trainable:
            g = grads.get(p.uid)
            if g is None:
                g = np.zeros_like(p.data)
            m = state.first_moment.setdefault(p.uid, np.zeros_like(p.data))
            v = state.second_moment.setdefault(p.uid, np.zeros_like(p.data))
            m = b1 * m + (1.0 - b1) * g
            v = b2 * v + (1.0 - b2) * (g * g)
            state.first_moment[p.uid] = m
            state.second_moment[p.uid] = v

            m_hat = m / correction1
            v_hat = v / correction2
            p.data = p.data - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)


def optimizer_step(params: Iterable[Tensor], grads: Dict[int, np.ndarray], optimizer: Adam) -> OptimizerState:
    """Functional form: verify `params` match the optimizer's and apply one step."""
    params = list(params)
    if [p.uid for p in params] != [p.uid for p in optimizer.params]:
        raise ContractError("parameters do not match the optimizer state")
    optimizer.step(grads)
    return optimizer.state
