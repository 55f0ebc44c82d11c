from typing import Dict, Mapping

import numpy as np

from .config import OptimizerConfig


class Adam:
    """The Adam class keeps first and second moment estimates per parameter
    name and updates the network's parameter arrays in place. Parameters
    whose name starts with one of ``config.frozen`` are left untouched,
    which is how a branch is given a zero learning rate.
    """

    def __init__(self, config: OptimizerConfig):
        self.config = config
        self.step_count = 0
        self._m: Dict[str, np.ndarray] = {}
        self._v: Dict[str, np.ndarray] = {}

    def is_frozen(self, name: str) -> bool:
        return any(name.startswith(prefix) for prefix in self.config.frozen)

    def step(
        self, parameters: Mapping[str, np.ndarray], gradients: Mapping[str, np.ndarray]
    ) -> None:
        """applies one bias-corrected update.

        Args:
            parameters (Mapping[str, np.ndarray]): live parameter arrays
            gradients (Mapping[str, np.ndarray]): gradients by the same names
        """
        c = self.config
        self.step_count += 1
        correction1 = 1.0 - c.beta1**self.step_count
        correction2 = 1.0 - c.beta2**self.step_count
        for name, param in parameters.items():
            grad = gradients.get(name)
            if grad is None or self.is_frozen(name):
                continue
            m = self._m.setdefault(name, np.zeros_like(param))
            v = self._v.setdefault(name, np.zeros_like(param))
            m *= c.beta1
            m += (1.0 - c.beta1) * grad
            v *= c.beta2
            v += (1.0 - c.beta2) * grad * grad
            param -= (
                c.learning_rate
                * (m / correction1)
                / (np.sqrt(v / correction2) + c.epsilon)
            )
