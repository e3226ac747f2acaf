from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
import scipy.sparse as sp

from core.enums import ERelationship


@dataclass(frozen=True, slots=True)
class SubgraphStats:
    relationship: ERelationship
    n: int
    edge_count: int
    weight_sum: float
    max_weight: float
    density: float

    def to_dict(self) -> dict:
        return {
            "relationship": self.relationship.rotulo,
            "n": self.n,
            "edge_count": self.edge_count,
            "weight_sum": self.weight_sum,
            "max_weight": self.max_weight,
            "density": self.density,
        }


@dataclass(frozen=True, slots=True, eq=False)
class Subgraph:
    """Subgrafo usuário-usuário ponderado e não dirigido de uma relação.

    `adjacency` é simétrica, sem diagonal e só guarda pesos positivos. Os índices
    são posições na lista de usuários rotulados.
    """

    relationship: ERelationship
    adjacency: sp.csr_matrix

    def __post_init__(self) -> None:
        matriz = sp.csr_matrix(self.adjacency, dtype=np.float64)
        if matriz.shape[0] != matriz.shape[1]:
            raise ValueError(f"Adjacência não quadrada: {matriz.shape}.")
        matriz = (matriz - sp.diags(matriz.diagonal())).tocsr()
        matriz.eliminate_zeros()
        if matriz.nnz and matriz.data.min() < 0:
            raise ValueError("Pesos de aresta devem ser não negativos.")
        if (abs(matriz - matriz.T) > 0).nnz:
            raise ValueError("Adjacência de subgrafo deve ser simétrica.")
        matriz.sort_indices()
        object.__setattr__(self, "adjacency", matriz)

    @property
    def n(self) -> int:
        return int(self.adjacency.shape[0])

    @property
    def degree(self) -> np.ndarray:
        """|N_i|: número de vizinhos (ignora pesos)."""
        return np.diff(self.adjacency.indptr).astype(np.int64)

    @property
    def edge_count(self) -> int:
        return int(sp.triu(self.adjacency, k=1).nnz)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Arestas (i, j, peso) com i < j, em ordem lexicográfica."""
        superior = sp.triu(self.adjacency, k=1).tocoo()
        ordem = np.lexsort((superior.col, superior.row))
        for k in ordem:
            yield int(superior.row[k]), int(superior.col[k]), float(superior.data[k])

    @classmethod
    def from_edges(
        cls, relationship: ERelationship, n: int, edges: list[tuple[int, int, float]]
    ) -> "Subgraph":
        if not edges:
            return cls(relationship, sp.csr_matrix((n, n), dtype=np.float64))
        linhas, colunas, pesos = (np.asarray(v) for v in zip(*edges))
        superior = sp.coo_matrix((pesos.astype(np.float64), (linhas, colunas)), shape=(n, n))
        return cls(relationship, (superior + superior.T).tocsr())
