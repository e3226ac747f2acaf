from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, slots=True, eq=False)
class TopicHistogram:
    """Contagem o_k^i de tweets do usuário i atribuídos ao tópico k (usuários x K)."""

    counts: sp.csr_matrix

    def __post_init__(self) -> None:
        matriz = sp.csr_matrix(self.counts, dtype=np.float64)
        if matriz.nnz and (matriz.data.min() < 0 or np.any(matriz.data != np.round(matriz.data))):
            raise ValueError("Histograma de tópicos deve conter inteiros não negativos.")
        matriz.eliminate_zeros()
        matriz.sort_indices()
        object.__setattr__(self, "counts", matriz)

    @property
    def user_count(self) -> int:
        return int(self.counts.shape[0])

    @property
    def topic_count(self) -> int:
        return int(self.counts.shape[1])

    def of_user(self, user: int) -> np.ndarray:
        return np.asarray(self.counts[user].toarray()).ravel().astype(np.int64)

    def total(self) -> int:
        return int(self.counts.sum())
