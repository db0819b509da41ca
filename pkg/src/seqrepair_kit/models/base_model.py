from typing import Dict, Mapping, Tuple

import numpy as np

from ..core.exceptions import ContractViolation
from ..core.tensor import Tensor
from ..data.rng import Rng


def xavier_uniform(rng: Rng, shape: Tuple[int, ...], fan_in: int, fan_out: int) -> np.ndarray:
    """Glorot-uniform initialisation in float32."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(np.float32)


class ParameterStore:
    """
    Base model holding named parameter tensors.

    Parameters are kept in registration order; that order drives optimizer
    updates and checkpoint layout, so it must be deterministic.
    """

    def __init__(self) -> None:
        self._params: Dict[str, Tensor] = {}

    def register(self, name: str, value: np.ndarray) -> Tensor:
        if name in self._params:
            raise ContractViolation("parameter {name} registered twice", params={"name": name})
        tensor = Tensor(np.asarray(value, dtype=np.float32), requires_grad=True)
        self._params[name] = tensor
        return tensor

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def parameters(self) -> Dict[str, Tensor]:
        return dict(self._params)

    def num_parameters(self) -> int:
        return sum(t.size for t in self._params.values())

    def zero_grad(self) -> None:
        for tensor in self._params.values():
            tensor.grad = None

    def max_abs(self) -> float:
        return max(float(np.abs(t.data).max()) for t in self._params.values())

    def astype(self, dtype) -> "ParameterStore":
        """Convert every parameter in place (float64 for gradient checks)."""
        for tensor in self._params.values():
            tensor.data = tensor.data.astype(dtype)
        return self

    def to_dict(self) -> Dict[str, np.ndarray]:
        """
        Convert parameters to a name -> array dictionary (copies).
        """
        return {name: tensor.data.copy() for name, tensor in self._params.items()}

    def load_dict(self, arrays: Mapping[str, np.ndarray]) -> None:
        """
        Replace parameter values.

        Raises:
            ContractViolation: If a name is missing or a shape differs
        """
        for name, tensor in self._params.items():
            if name not in arrays:
                raise ContractViolation("missing parameter {name}", params={"name": name})
            value = np.asarray(arrays[name])
            if value.shape != tensor.shape:
                raise ContractViolation(
                    "parameter {name} has shape {got}, expected {expected}",
                    params={"name": name, "got": value.shape, "expected": tensor.shape},
                )
            tensor.data = value.astype(tensor.dtype).copy()
