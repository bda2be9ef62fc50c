"""
Autodiff package: tensors, reverse-mode gradients, gradient checking and Adam
"""
from .gradcheck import (
    finite_difference_gradient,
    max_relative_error,
    max_sampled_relative_error,
    relative_error,
    sampled_finite_difference,
)
from .optim import Adam, OptimizerState, optimizer_step
from .tensor import (
    ComputeGraph,
    Tensor,
    activation,
    add,
    add_bias,
    as_tensor,
    backward,
    elementwise,
    matmul,
    mean_all,
    mul,
    reshape,
    sigmoid,
    stack,
    sub,
    sum_all,
    tanh,
)

__all__ = [
    "Tensor",
    "ComputeGraph",
    "as_tensor",
    "matmul",
    "add_bias",
    "add",
    "sub",
    "mul",
    "elementwise",
    "sigmoid",
    "tanh",
    "activation",
    "sum_all",
    "mean_all",
    "reshape",
    "stack",
    "backward",
    "finite_difference_gradient",
    "relative_error",
    "max_relative_error",
    "sampled_finite_difference",
    "max_sampled_relative_error",
    "Adam",
    "OptimizerState",
    "optimizer_step",
]
