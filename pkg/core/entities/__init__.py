from core.entities.hetnet import HetNet, in_neighbors, out_neighbors
from core.entities.records import FollowRecord, LabelRecord, TweetRecord, UserRecord
from core.entities.subgraph import Subgraph, SubgraphStats
from core.entities.topic_histogram import TopicHistogram

__all__ = [
    "HetNet",
    "Subgraph",
    "SubgraphStats",
    "TopicHistogram",
    "UserRecord",
    "FollowRecord",
    "TweetRecord",
    "LabelRecord",
    "out_neighbors",
    "in_neighbors",
]
