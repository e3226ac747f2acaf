from .e_node_kind import ENodeKind
from .e_edge_kind import EEdgeKind
from .e_relationship import ERelationship
from .e_label import ELabel

__all__ = ["ENodeKind", "EEdgeKind", "ERelationship", "ELabel"]
