from enum import Enum

from core.enums.e_node_kind import ENodeKind


class EEdgeKind(Enum):
    """Tipos de aresta: follows (usuário→usuário), posts (usuário→tweet), contains (tweet→tópico)."""
    FOLLOWS = 1
    POSTS = 2
    CONTAINS = 3

    @property
    def origem(self) -> ENodeKind:
        return _EXTREMOS[self][0]

    @property
    def destino(self) -> ENodeKind:
        return _EXTREMOS[self][1]


_EXTREMOS: dict[EEdgeKind, tuple[ENodeKind, ENodeKind]] = {
    EEdgeKind.FOLLOWS: (ENodeKind.USER, ENodeKind.USER),
    EEdgeKind.POSTS: (ENodeKind.USER, ENodeKind.TWEET),
    EEdgeKind.CONTAINS: (ENodeKind.TWEET, ENodeKind.TOPIC),
}
