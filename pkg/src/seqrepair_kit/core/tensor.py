"""Dense tensors with reverse-mode automatic differentiation.

A :class:`Tensor` wraps a ``numpy.ndarray``. Every differentiable operation
records its parents and a backward closure that maps the output gradient to
one gradient per parent; :meth:`Tensor.backward` walks the recorded graph in
reverse topological order and accumulates gradients into the leaves.

Training runs in float32. Gradient checks switch the default to float64 with
:func:`default_dtype`; operations never down-cast their inputs, so a float64
graph stays float64 end to end.
"""

from __future__ import annotations

import logging
from contextlib import contextmanager
from typing import Any, Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import ContractViolation

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, float, int, Sequence[Any]]
BackwardFn = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

_DEFAULT_DTYPE = np.dtype(np.float32)
_GRAD_ENABLED = True


@contextmanager
def default_dtype(dtype: Any) -> Iterator[None]:
    """Temporarily change the dtype used for tensors built from Python data."""
    global _DEFAULT_DTYPE
    previous = _DEFAULT_DTYPE
    _DEFAULT_DTYPE = np.dtype(dtype)
    try:
        yield
    finally:
        _DEFAULT_DTYPE = previous


def get_default_dtype() -> np.dtype:
    return _DEFAULT_DTYPE


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable graph recording (evaluation, finite differences, optimizer updates)."""
    global _GRAD_ENABLED
    previous = _GRAD_ENABLED
    _GRAD_ENABLED = False
    try:
        yield
    finally:
        _GRAD_ENABLED = previous


def _as_array(data: ArrayLike, dtype: Any = None) -> np.ndarray:
    if dtype is not None:
        return np.asarray(data, dtype=dtype)
    if isinstance(data, np.ndarray) and data.dtype.kind == "f":
        return data
    return np.asarray(data, dtype=_DEFAULT_DTYPE)


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """
    N-dimensional array node of the autodiff graph.

    Args:
        data: Values; Python data is converted to the current default dtype
        requires_grad (bool): Whether gradients must be accumulated into this tensor
        dtype: Explicit dtype, overrides the default

    Examples:
        >>> w = Tensor([[1.0, 2.0]], requires_grad=True)
        >>> (w * w).sum().backward()
        >>> w.grad
        array([[2., 4.]], dtype=float32)
    """

    __array_priority__ = 100

    def __init__(self, data: ArrayLike, requires_grad: bool = False, dtype: Any = None) -> None:
        self.data: np.ndarray = _as_array(data, dtype)
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._parents: Tuple[Tensor, ...] = ()
        self._backward_fn: Optional[BackwardFn] = None
        self._op: str = "leaf"

    # ------------------------------------------------------------------ #
    # Properties
    # ------------------------------------------------------------------ #
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def is_leaf(self) -> bool:
        return self._backward_fn is None

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> Tensor:
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, op={self._op}{flag})"

    def __len__(self) -> int:
        return self.shape[0]

    # ------------------------------------------------------------------ #
    # Graph
    # ------------------------------------------------------------------ #
    def backward(self, grad: Optional[ArrayLike] = None) -> None:
        """
        Back-propagate from this tensor.

        Args:
            grad: Upstream gradient; defaults to ones for a single-element tensor

        Raises:
            ContractViolation: If no gradient is given for a non-scalar tensor
        """
        if not self.requires_grad:
            return
        if grad is None:
            if self.data.size != 1:
                raise ContractViolation(
                    "backward() needs an explicit gradient for shape {shape}",
                    params={"shape": self.shape},
                )
            seed = np.ones_like(self.data)
        else:
            seed = np.asarray(grad, dtype=self.dtype).reshape(self.shape)

        order = topological_order(self)
        grads = {id(self): seed}
        for node in reversed(order):
            node_grad = grads.pop(id(node), None)
            if node_grad is None:
                continue
            if node.is_leaf:
                node.grad = node_grad.copy() if node.grad is None else node.grad + node_grad
                continue
            parent_grads = node._backward_fn(node_grad)
            for parent, parent_grad in zip(node._parents, parent_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + parent_grad
                else:
                    grads[key] = parent_grad

    # ------------------------------------------------------------------ #
    # Operators
    # ------------------------------------------------------------------ #
    def __add__(self, other: Any) -> Tensor:
        return add(self, other)

    def __radd__(self, other: Any) -> Tensor:
        return add(other, self)

    def __sub__(self, other: Any) -> Tensor:
        return sub(self, other)

    def __rsub__(self, other: Any) -> Tensor:
        return sub(other, self)

    def __mul__(self, other: Any) -> Tensor:
        return mul(self, other)

    def __rmul__(self, other: Any) -> Tensor:
        return mul(other, self)

    def __truediv__(self, other: Any) -> Tensor:
        return div(self, other)

    def __rtruediv__(self, other: Any) -> Tensor:
        return div(other, self)

    def __neg__(self) -> Tensor:
        return neg(self)

    def __pow__(self, exponent: float) -> Tensor:
        return power(self, exponent)

    def __matmul__(self, other: Any) -> Tensor:
        return matmul(self, other)

    def __getitem__(self, key: Any) -> Tensor:
        return getitem(self, key)

    def sum(self, axis: Any = None, keepdims: bool = False) -> Tensor:
        return tsum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: Any = None, keepdims: bool = False) -> Tensor:
        return tmean(self, axis=axis, keepdims=keepdims)

    def max(self, axis: int) -> Tensor:
        return tmax(self, axis=axis)

    def reshape(self, *shape: Any) -> Tensor:
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes: int) -> Tensor:
        return transpose(self, axes or None)

    def exp(self) -> Tensor:
        return exp(self)

    def log(self) -> Tensor:
        return log(self)

    def tanh(self) -> Tensor:
        return tanh(self)

    def sigmoid(self) -> Tensor:
        return sigmoid(self)

    def relu(self) -> Tensor:
        return relu(self)


TensorLike = Union[Tensor, ArrayLike]


def topological_order(root: Tensor) -> List[Tensor]:
    """Iterative post-order DFS; each node appears exactly once."""
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def as_tensor(value: TensorLike, like: Optional[Tensor] = None) -> Tensor:
    """Wrap constants, matching ``like``'s dtype so graphs never change precision."""
    if isinstance(value, Tensor):
        return value
    dtype = like.dtype if like is not None else None
    return Tensor(value, dtype=dtype)


def make_result(data: np.ndarray, parents: Sequence[Tensor], backward_fn: BackwardFn, op: str) -> Tensor:
    """Create an op output and record it in the graph when any parent needs gradients."""
    out = Tensor(data, dtype=data.dtype if data.dtype.kind == "f" else None)
    if _GRAD_ENABLED and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = tuple(parents)
        out._backward_fn = backward_fn
        out._op = op
    return out


def _binary(a: TensorLike, b: TensorLike) -> Tuple[Tensor, Tensor]:
    if isinstance(a, Tensor):
        return a, as_tensor(b, like=a)
    b = as_tensor(b)
    return as_tensor(a, like=b), b


# ---------------------------------------------------------------------- #
# Elementwise arithmetic
# ---------------------------------------------------------------------- #
def add(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _binary(a, b)

    def backward(g: np.ndarray):
        return unbroadcast(g, a.shape), unbroadcast(g, b.shape)

    return make_result(a.data + b.data, (a, b), backward, "add")


def sub(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _binary(a, b)

    def backward(g: np.ndarray):
        return unbroadcast(g, a.shape), unbroadcast(-g, b.shape)

    return make_result(a.data - b.data, (a, b), backward, "sub")


def mul(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _binary(a, b)

    def backward(g: np.ndarray):
        return unbroadcast(g * b.data, a.shape), unbroadcast(g * a.data, b.shape)

    return make_result(a.data * b.data, (a, b), backward, "mul")


def div(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _binary(a, b)

    def backward(g: np.ndarray):
        ga = unbroadcast(g / b.data, a.shape)
        gb = unbroadcast(-g * a.data / (b.data * b.data), b.shape)
        return ga, gb

    return make_result(a.data / b.data, (a, b), backward, "div")


def neg(a: Tensor) -> Tensor:
    return make_result(-a.data, (a,), lambda g: (-g,), "neg")


def power(a: Tensor, exponent: float) -> Tensor:
    def backward(g: np.ndarray):
        return (g * exponent * a.data ** (exponent - 1),)

    return make_result(a.data ** exponent, (a,), backward, "pow")


def exp(a: Tensor) -> Tensor:
    out_data = np.exp(a.data)
    return make_result(out_data, (a,), lambda g: (g * out_data,), "exp")


def log(a: Tensor) -> Tensor:
    return make_result(np.log(a.data), (a,), lambda g: (g / a.data,), "log")


def clamp_min(a: Tensor, floor: float) -> Tensor:
    """``max(a, floor)``; the gradient is zero where the floor is active."""
    active = a.data >= floor
    out_data = np.where(active, a.data, a.dtype.type(floor))
    return make_result(out_data, (a,), lambda g: (g * active,), "clamp_min")


def tanh(a: Tensor) -> Tensor:
    out_data = np.tanh(a.data)
    return make_result(out_data, (a,), lambda g: (g * (1 - out_data * out_data),), "tanh")


def sigmoid(a: Tensor) -> Tensor:
    # tanh form avoids overflow in exp for large negative inputs
    out_data = 0.5 * (np.tanh(0.5 * a.data) + 1)
    return make_result(out_data, (a,), lambda g: (g * out_data * (1 - out_data),), "sigmoid")


def relu(a: Tensor) -> Tensor:
    positive = a.data > 0
    return make_result(np.where(positive, a.data, 0).astype(a.dtype), (a,), lambda g: (g * positive,), "relu")


def where(condition: np.ndarray, a: TensorLike, b: TensorLike) -> Tensor:
    """Select from ``a`` where ``condition`` holds, else from ``b`` (condition is constant)."""
    a, b = _binary(a, b)
    cond = np.asarray(condition, dtype=bool)

    def backward(g: np.ndarray):
        return unbroadcast(np.where(cond, g, 0), a.shape), unbroadcast(np.where(cond, 0, g), b.shape)

    return make_result(np.where(cond, a.data, b.data), (a, b), backward, "where")


# ---------------------------------------------------------------------- #
# Linear algebra and reductions
# ---------------------------------------------------------------------- #
def matmul(a: TensorLike, b: TensorLike) -> Tensor:
    a, b = _binary(a, b)
    if b.ndim != 2:
        raise ContractViolation("matmul expects a 2-D right operand, got shape {shape}", params={"shape": b.shape})
    if a.shape[-1] != b.shape[0]:
        raise ContractViolation(
            "matmul shapes {a} and {b} are not aligned", params={"a": a.shape, "b": b.shape}
        )

    def backward(g: np.ndarray):
        ga = g @ b.data.T
        if a.ndim == 1:
            gb = np.outer(a.data, g)
        else:
            gb = unbroadcast(np.swapaxes(a.data, -1, -2) @ g, b.shape)
        return ga, gb

    return make_result(a.data @ b.data, (a, b), backward, "matmul")


def _expand_reduced(g: np.ndarray, shape: Tuple[int, ...], axis: Any, keepdims: bool) -> np.ndarray:
    if axis is not None and not keepdims:
        g = np.expand_dims(g, axis)
    return np.broadcast_to(g, shape)


def tsum(a: Tensor, axis: Any = None, keepdims: bool = False) -> Tensor:
    def backward(g: np.ndarray):
        return (np.array(_expand_reduced(g, a.shape, axis, keepdims)),)

    return make_result(np.asarray(a.data.sum(axis=axis, keepdims=keepdims)), (a,), backward, "sum")


def tmean(a: Tensor, axis: Any = None, keepdims: bool = False) -> Tensor:
    if a.size == 0:
        raise ContractViolation("mean of an empty tensor")
    count = a.size if axis is None else int(np.prod([a.shape[ax] for ax in np.atleast_1d(axis)]))

    def backward(g: np.ndarray):
        return (np.array(_expand_reduced(g, a.shape, axis, keepdims)) / count,)

    return make_result(np.asarray(a.data.mean(axis=axis, keepdims=keepdims)), (a,), backward, "mean")


def tmax(a: Tensor, axis: int) -> Tensor:
    """Maximum along one axis; ties route the gradient to the first maximum."""
    index = np.expand_dims(np.argmax(a.data, axis=axis), axis)
    out_data = np.take_along_axis(a.data, index, axis=axis).squeeze(axis)

    def backward(g: np.ndarray):
        full = np.zeros_like(a.data)
        np.put_along_axis(full, index, np.expand_dims(g, axis), axis=axis)
        return (full,)

    return make_result(out_data, (a,), backward, "max")


# ---------------------------------------------------------------------- #
# Shape manipulation
# ---------------------------------------------------------------------- #
def reshape(a: Tensor, shape: Tuple[int, ...]) -> Tensor:
    return make_result(a.data.reshape(shape), (a,), lambda g: (g.reshape(a.shape),), "reshape")


def transpose(a: Tensor, axes: Optional[Tuple[int, ...]] = None) -> Tensor:
    inverse = None if axes is None else tuple(np.argsort(axes))
    return make_result(np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),), "transpose")


def _is_advanced(key: Any) -> bool:
    parts = key if isinstance(key, tuple) else (key,)
    return any(isinstance(part, (np.ndarray, list)) for part in parts)


def getitem(a: Tensor, key: Any) -> Tensor:
    advanced = _is_advanced(key)

    def backward(g: np.ndarray):
        full = np.zeros_like(a.data)
        if advanced:
            # repeated indices (embedding lookups) must accumulate
            np.add.at(full, key, g)
        else:
            full[key] = g
        return (full,)

    return make_result(np.array(a.data[key]), (a,), backward, "getitem")


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    if not tensors:
        raise ContractViolation("concat needs at least one tensor")
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum(sizes)[:-1]

    def backward(g: np.ndarray):
        return tuple(np.split(g, bounds, axis=axis))

    return make_result(np.concatenate([t.data for t in tensors], axis=axis), tuple(tensors), backward, "concat")


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise ContractViolation("stack needs at least one tensor")

    def backward(g: np.ndarray):
        return tuple(np.moveaxis(g, axis, 0))

    return make_result(np.stack([t.data for t in tensors], axis=axis), tuple(tensors), backward, "stack")
