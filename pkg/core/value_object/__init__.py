from .data_referencia import DataReferencia
from .node_id import NodeId

__all__ = ["DataReferencia", "NodeId"]
