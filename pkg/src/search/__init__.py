from src.search.assumption import AssumptionReport, check_assumption
from src.search.engine import SearchConfig, SearchResult, pop_search
from src.search.frontier import best_faster_or_equal, binned_frontier, frontier
from src.search.pruning import PruneCertificate, is_pruned, update_certificates
from src.search.records import TrainedRecord
from src.search.spaces import BackboneSpace, DecoderSpace, ExplicitSpace, SearchSpace

__all__ = [
    "AssumptionReport",
    "BackboneSpace",
    "DecoderSpace",
    "ExplicitSpace",
    "PruneCertificate",
    "SearchConfig",
    "SearchResult",
    "SearchSpace",
    "TrainedRecord",
    "best_faster_or_equal",
    "binned_frontier",
    "check_assumption",
    "frontier",
    "is_pruned",
    "pop_search",
    "update_certificates",
]
