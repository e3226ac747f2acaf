from enum import IntEnum


class ENodeKind(IntEnum):
    """Tipos de nó da rede heterogênea."""
    USER = 1
    TWEET = 2
    TOPIC = 3
