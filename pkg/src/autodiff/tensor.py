"""
Dense tensors with define-by-run reverse-mode automatic differentiation.

Every op returns a new Tensor; inputs are never mutated. When at least one
input tracks gradients, the output records its parents and a local backward
rule. `backward` walks the recorded graph in reverse topological order.
"""
import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ContractError, DimensionError
from ..utils.logging import get_logger

logger = get_logger("autodiff.tensor")

_uids = itertools.count()

Scalar = Union[int, float]
BackwardRule = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]


class Tensor:
    """
    Dense float64 array with optional gradient tracking.

    Attributes:
        data: Row-major float64 array
        requires_grad: Whether gradients flow into this tensor
        grad: Gradient written by the last `backward` call (leaves only)
        name: Optional human-readable name (model parameters use dotted names)
        uid: Process-unique identifier, the key of gradient maps
    """

    __slots__ = ("data", "requires_grad", "grad", "name", "uid", "op", "_parents", "_backward")

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        name: Optional[str] = None,
        _parents: Tuple["Tensor", ...] = (),
        _backward: Optional[BackwardRule] = None,
        _op: str = "leaf",
    ):
        self.data = np.ascontiguousarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self.name = name
        self.uid = next(_uids)
        self.op = _op
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def is_leaf(self) -> bool:
        return not self._parents

    def item(self) -> float:
        if self.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        """Copy of the underlying data."""
        return self.data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def __repr__(self) -> str:
        label = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad}{label})"

    # Operator sugar; the module-level functions hold the semantics
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return mul(-1.0, self)


def as_tensor(value) -> Tensor:
    """Wrap arrays and numbers as constant tensors; tensors pass through."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value, requires_grad=False)


def _result(data: np.ndarray, parents: Tuple[Tensor, ...], rule: BackwardRule, op: str) -> Tensor:
    if any(p.requires_grad for p in parents):
        return Tensor(data, requires_grad=True, _parents=parents, _backward=rule, _op=op)
    return Tensor(data, requires_grad=False, _op=op)


# ---------------------------------------------------------------------------
# Linear algebra
# ---------------------------------------------------------------------------

def matmul(a, b) -> Tensor:
    """
    Matrix product [m×k]·[k×n] → [m×n].

    The left operand may also be a single row vector [k], giving [n].
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim not in (1, 2) or b.ndim != 2 or a.shape[-1] != b.shape[0]:
        raise DimensionError("matmul inner dimensions disagree", a.shape, b.shape)

    a_data, b_data = a.data, b.data

    def rule(g: np.ndarray):
        a2 = a_data if a_data.ndim == 2 else a_data[None, :]
        g2 = g if g.ndim == 2 else g[None, :]
        grad_a = (g2 @ b_data.T).reshape(a_data.shape)
        grad_b = a2.T @ g2
        return grad_a, grad_b

    return _result(a_data @ b_data, (a, b), rule, "matmul")


def add_bias(x, bias) -> Tensor:
    """Add a [n] bias vector to every row of a [..., n] tensor."""
    x, bias = as_tensor(x), as_tensor(bias)
    if bias.ndim != 1 or x.shape[-1] != bias.shape[0]:
        raise DimensionError("bias length must match the last dimension", x.shape, bias.shape)

    n = bias.shape[0]

    def rule(g: np.ndarray):
        return g, g.reshape(-1, n).sum(axis=0)

    return _result(x.data + bias.data, (x, bias), rule, "add_bias")


# ---------------------------------------------------------------------------
# Elementwise arithmetic (identical shapes, or a Python scalar with a tensor)
# ---------------------------------------------------------------------------

def _is_scalar(value) -> bool:
    return isinstance(value, (int, float, np.floating, np.integer)) and not isinstance(value, bool)


def _check_same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"{op} needs identical shapes", a.shape, b.shape)


def add(a, b) -> Tensor:
    if _is_scalar(a):
        a, b = b, a
    if _is_scalar(b):
        a = as_tensor(a)
        c = float(b)
        return _result(a.data + c, (a,), lambda g: (g,), "add")

    a, b = as_tensor(a), as_tensor(b)
    _check_same_shape("add", a, b)
    return _result(a.data + b.data, (a, b), lambda g: (g, g), "add")


def sub(a, b) -> Tensor:
    if _is_scalar(a):
        b = as_tensor(b)
        c = float(a)
        return _result(c - b.data, (b,), lambda g: (-g,), "sub")
    if _is_scalar(b):
        a = as_tensor(a)
        c = float(b)
        return _result(a.data - c, (a,), lambda g: (g,), "sub")

    a, b = as_tensor(a), as_tensor(b)
    _check_same_shape("sub", a, b)
    return _result(a.data - b.data, (a, b), lambda g: (g, -g), "sub")


def mul(a, b) -> Tensor:
    if _is_scalar(a):
        a, b = b, a
    if _is_scalar(b):
        a = as_tensor(a)
        c = float(b)
        return _result(a.data * c, (a,), lambda g: (g * c,), "mul")

    a, b = as_tensor(a), as_tensor(b)
    _check_same_shape("mul", a, b)
    a_data, b_data = a.data, b.data
    return _result(a_data * b_data, (a, b), lambda g: (g * b_data, g * a_data), "mul")


def elementwise(op: str, a, b) -> Tensor:
    """Dispatch an elementwise op by name: add, sub or mul."""
    try:
        fn = _ELEMENTWISE[op]
    except KeyError:
        raise ContractError(f"Unknown elementwise op {op!r}; expected one of {sorted(_ELEMENTWISE)}")
    return fn(a, b)


_ELEMENTWISE = {"add": add, "sub": sub, "mul": mul}


# ---------------------------------------------------------------------------
# Activations
# ---------------------------------------------------------------------------

def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    s = _stable_sigmoid(a.data)
    return _result(s, (a,), lambda g: (g * s * (1.0 - s),), "sigmoid")


def tanh(a) -> Tensor:
    a = as_tensor(a)
    t = np.tanh(a.data)
    return _result(t, (a,), lambda g: (g * (1.0 - t * t),), "tanh")


def activation(op: str, a) -> Tensor:
    """Dispatch an activation by name: sigmoid or tanh."""
    if op == "sigmoid":
        return sigmoid(a)
    if op == "tanh":
        return tanh(a)
    raise ContractError(f"Unknown activation {op!r}; expected 'sigmoid' or 'tanh'")


# ---------------------------------------------------------------------------
# Reductions and structure
# ---------------------------------------------------------------------------

def sum_all(a) -> Tensor:
    """Sum of every element, as a scalar tensor."""
    a = as_tensor(a)
    shape = a.shape
    return _result(np.asarray(a.data.sum()), (a,), lambda g: (np.broadcast_to(g, shape).copy(),), "sum")


def mean_all(a) -> Tensor:
    """Mean of every element, as a scalar tensor."""
    a = as_tensor(a)
    if a.size == 0:
        raise ContractError("mean of an empty tensor")
    return mul(sum_all(a), 1.0 / a.size)


def reshape(a, shape: Tuple[int, ...]) -> Tensor:
    """Same data viewed with a new shape of equal size."""
    a = as_tensor(a)
    shape = tuple(int(s) for s in shape)
    if int(np.prod(shape, dtype=np.int64)) != a.size:
        raise DimensionError("reshape must preserve the element count", a.shape, shape)
    original = a.shape
    return _result(a.data.reshape(shape), (a,), lambda g: (g.reshape(original),), "reshape")


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """Stack equally-shaped tensors along a new axis."""
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ContractError("stack needs at least one tensor")
    first = tensors[0].shape
    for t in tensors[1:]:
        if t.shape != first:
            raise DimensionError("stack needs identical shapes", first, t.shape)

    data = np.stack([t.data for t in tensors], axis=axis)
    count = len(tensors)

    def rule(g: np.ndarray):
        return tuple(np.take(g, i, axis=axis) for i in range(count))

    return _result(data, tuple(tensors), rule, "stack")


# ---------------------------------------------------------------------------
# Graph and backward
# ---------------------------------------------------------------------------

@dataclass
class ComputeGraph:
    """
    Topologically ordered record of the ops that produced an output.

    `nodes` lists every gradient-tracking tensor reachable from the output,
    parents before children, so the reverse order is a valid backward order.
    """
    output: Tensor
    nodes: List[Tensor] = field(default_factory=list)

    @classmethod
    def from_output(cls, output: Tensor) -> "ComputeGraph":
        nodes: List[Tensor] = []
        if not output.requires_grad:
            return cls(output=output, nodes=nodes)

        visited = set()
        # Iterative DFS; unrolled recurrences are far deeper than the recursion limit
        stack_: List[Tuple[Tensor, bool]] = [(output, False)]
        while stack_:
            node, expanded = stack_.pop()
            if expanded:
                nodes.append(node)
                continue
            if node.uid in visited:
                continue
            visited.add(node.uid)
            stack_.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and parent.uid not in visited:
                    stack_.append((parent, False))
        return cls(output=output, nodes=nodes)

    @property
    def leaves(self) -> List[Tensor]:
        return [n for n in self.nodes if n.is_leaf]

    def __len__(self) -> int:
        return len(self.nodes)


def backward(loss: Tensor, graph: Optional[ComputeGraph] = None) -> Dict[int, np.ndarray]:
    """
    Reverse-mode gradients of a scalar loss.

    Args:
        loss: Single-element tensor
        graph: Pre-built graph of `loss`; built on demand when omitted

    Returns:
        Map of leaf uid → gradient array for every gradient-tracking leaf
        reachable from the loss. Each leaf's `grad` is overwritten with the same
        array, so calling backward twice on one graph gives identical results.
    """
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")

    graph = graph if graph is not None else ComputeGraph.from_output(loss)
    if graph.output is not loss:
        raise ContractError("graph was not built from this loss")
    if not graph.nodes:
        logger.warning("backward_detached_loss", loss_shape=list(loss.shape))
        return {}

    pending: Dict[int, np.ndarray] = {loss.uid: np.ones_like(loss.data)}
    gradients: Dict[int, np.ndarray] = {}

    for node in reversed(graph.nodes):
        g = pending.pop(node.uid, None)
        if g is None:
            continue
        if node.is_leaf:
            gradients[node.uid] = g
            node.grad = g
            continue
        for parent, parent_grad in zip(node._parents, node._backward(g)):
            if parent_grad is None or not parent.requires_grad:
                continue
            if parent.uid in pending:
                pending[parent.uid] = pending[parent.uid] + parent_grad
            else:
                pending[parent.uid] = parent_grad

    return gradients
