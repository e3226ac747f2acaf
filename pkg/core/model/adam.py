from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(slots=True)
class AdamState:
    """Momentos por parâmetro (mesmo formato do tensor) e contador de passos."""

    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    def copy(self) -> "AdamState":
        return AdamState(
            beta1=self.beta1,
            beta2=self.beta2,
            epsilon=self.epsilon,
            step=self.step,
            m={nome: momento.copy() for nome, momento in self.m.items()},
            v={nome: momento.copy() for nome, momento in self.v.items()},
        )


@dataclass(slots=True)
class Adam:
    """Adam com decaimento de peso desacoplado: p <- p - lr*λ*p, depois o passo adaptativo."""

    lr: float
    weight_decay: float = 0.0
    state: AdamState = field(default_factory=AdamState)

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValueError("Taxa de aprendizado deve ser positiva.")
        if self.weight_decay < 0:
            raise ValueError("Decaimento de peso não pode ser negativo.")

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        """Atualiza `params` no lugar."""
        estado = self.state
        estado.step += 1
        bc1 = 1.0 - estado.beta1 ** estado.step
        bc2 = 1.0 - estado.beta2 ** estado.step
        passo = self.lr / bc1

        for nome, tensor in params.items():
            g = grads[nome]
            if g.shape != tensor.shape:
                raise ValueError(f"Gradiente de '{nome}' com formato {g.shape}; esperado {tensor.shape}.")
            if nome not in estado.m:
                estado.m[nome] = np.zeros_like(tensor)
                estado.v[nome] = np.zeros_like(tensor)

            if self.weight_decay:
                tensor -= self.lr * self.weight_decay * tensor

            estado.m[nome] *= estado.beta1
            estado.m[nome] += (1.0 - estado.beta1) * g
            estado.v[nome] *= estado.beta2
            estado.v[nome] += (1.0 - estado.beta2) * (g * g)

            denominador = np.sqrt(estado.v[nome] * (1.0 / bc2)) + estado.epsilon
            tensor -= passo * estado.m[nome] / denominador
