from enum import Enum


class ELabel(Enum):
    """Rótulo de verdade de um usuário rotulado."""
    COLLUSIVE = "collusive"
    NON_COLLUSIVE = "non_collusive"
