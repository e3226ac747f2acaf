from .normalizar_data import NormalizarData

__all__ = ["NormalizarData"]
