"""
GRU and dense layers built on the autodiff tensor ops.
"""
from typing import List, Optional, Tuple

import numpy as np

from ..autodiff import Tensor, add, add_bias, matmul, mul, sigmoid, sub, tanh
from ..errors import DimensionError

GRU_KIND = 0
DENSE_KIND = 1


def _uniform(rng: np.random.Generator, fan_in: int, shape: Tuple[int, ...]) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Layer:
    """Common parameter bookkeeping for GRU and dense layers."""

    kind: int
    param_names: Tuple[str, ...] = ()

    def __init__(self, name: str, in_dim: int, out_dim: int):
        self.name = name
        self.in_dim = in_dim
        self.out_dim = out_dim
        self._frozen = False

    @property
    def frozen(self) -> bool:
        return self._frozen

    @frozen.setter
    def frozen(self, value: bool) -> None:
        self._frozen = bool(value)
        for _, p in self.named_parameters():
            p.requires_grad = not self._frozen

    def named_parameters(self) -> List[Tuple[str, Tensor]]:
        return [(f"{self.name}.{n}", getattr(self, n)) for n in self.param_names]

    def parameters(self) -> List[Tensor]:
        return [p for _, p in self.named_parameters()]

    def expected_shapes(self) -> List[Tuple[int, ...]]:
        raise NotImplementedError

    def set_parameters(self, arrays: List[np.ndarray]) -> None:
        """Replace parameter data in declaration order (copies the arrays)."""
        for pname, shape, array in zip(self.param_names, self.expected_shapes(), arrays):
            if tuple(array.shape) != shape:
                raise DimensionError(f"{self.name}.{pname} shape", shape, array.shape)
            getattr(self, pname).data = np.array(array, dtype=np.float64, copy=True)

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.name}: {self.in_dim}->{self.out_dim}, frozen={self.frozen})"


class GRULayer(Layer):
    """
    Gated recurrent unit, update-gate form:

        z  = σ(x·W_z + h·U_z + b_z)
        r  = σ(x·W_r + h·U_r + b_r)
        ĥ  = tanh(x·W_h + (r⊙h)·U_h + b_h)
        h' = (1 − z)⊙h + z⊙ĥ
    """

    kind = GRU_KIND
    param_names = ("W_z", "W_r", "W_h", "U_z", "U_r", "U_h", "b_z", "b_r", "b_h")

    def __init__(self, name: str, input_dim: int, hidden_dim: int, rng: Optional[np.random.Generator] = None):
        super().__init__(name, input_dim, hidden_dim)
        for pname, shape in zip(self.param_names, self.expected_shapes()):
            if pname.startswith("b") or rng is None:
                data = np.zeros(shape)
            else:
                fan_in = input_dim if pname.startswith("W") else hidden_dim
                data = _uniform(rng, fan_in, shape)
            setattr(self, pname, Tensor(data, requires_grad=True, name=f"{name}.{pname}"))

    @property
    def hidden_dim(self) -> int:
        return self.out_dim

    def expected_shapes(self) -> List[Tuple[int, ...]]:
        i, h = self.in_dim, self.out_dim
        return [(i, h)] * 3 + [(h, h)] * 3 + [(h,)] * 3

    def step(self, x_t: Tensor, h_prev: Tensor) -> Tensor:
        """One recurrence step on [in] / [B×in] inputs."""
        if x_t.shape[-1] != self.in_dim:
            raise DimensionError(f"{self.name} input width", (self.in_dim,), x_t.shape)
        if h_prev.shape[-1] != self.out_dim or h_prev.shape[:-1] != x_t.shape[:-1]:
            raise DimensionError(f"{self.name} hidden state", x_t.shape[:-1] + (self.out_dim,), h_prev.shape)

        z = sigmoid(add_bias(add(matmul(x_t, self.W_z), matmul(h_prev, self.U_z)), self.b_z))
        r = sigmoid(add_bias(add(matmul(x_t, self.W_r), matmul(h_prev, self.U_r)), self.b_r))
        candidate = tanh(add_bias(add(matmul(x_t, self.W_h), matmul(mul(r, h_prev), self.U_h)), self.b_h))
        return add(mul(sub(1.0, z), h_prev), mul(z, candidate))

    def forward(self, inputs: List[Tensor]) -> List[Tensor]:
        """Unroll over per-timestep inputs starting from a zero hidden state."""
        if not inputs:
            return []
        h = Tensor(np.zeros(inputs[0].shape[:-1] + (self.out_dim,)))
        outputs = []
        for x_t in inputs:
            h = self.step(x_t, h)
            outputs.append(h)
        return outputs


class DenseLayer(Layer):
    """Affine map y = x·W + b."""

    kind = DENSE_KIND
    param_names = ("weight", "bias")

    def __init__(self, name: str, in_dim: int, out_dim: int, rng: Optional[np.random.Generator] = None):
        super().__init__(name, in_dim, out_dim)
        weight = _uniform(rng, in_dim, (in_dim, out_dim)) if rng is not None else np.zeros((in_dim, out_dim))
        self.weight = Tensor(weight, requires_grad=True, name=f"{name}.weight")
        self.bias = Tensor(np.zeros(out_dim), requires_grad=True, name=f"{name}.bias")

    def expected_shapes(self) -> List[Tuple[int, ...]]:
        return [(self.in_dim, self.out_dim), (self.out_dim,)]

    def __call__(self, x: Tensor) -> Tensor:
        return add_bias(matmul(x, self.weight), self.bias)


def gru_cell_step(x_t, h_prev, layer: GRULayer) -> Tensor:
    """Single GRU recurrence step; arrays are wrapped as constant tensors."""
    x_t = x_t if isinstance(x_t, Tensor) else Tensor(x_t)
    h_prev = h_prev if isinstance(h_prev, Tensor) else Tensor(h_prev)
    return layer.step(x_t, h_prev)
