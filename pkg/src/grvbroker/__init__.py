"""QoS-ranked content provider brokering: GRV ranking, provider selection and simulation."""
from .grv import (
    EpochMeasures,
    GrvParams,
    grv_bounds,
    grv_provider,
    grv_request,
    irrelevance_factor,
    measure_weight,
)
from .index import ContentEntry, ContentIndex, content_key
from .qos import AttributeSet, AttributeSpec, Polarity, normalize, normalize_vector, weighted_sum
from .ranking import ProviderRecord, RankTable, initialize_ranks, join, leave, rerank
from .selection import (
    RequestSpec,
    SelectionState,
    UserClassTable,
    estimated_reliability,
    jain_index,
    qualified_candidates,
    select_fair,
    select_naive,
    select_random,
    select_round_robin,
)

__version__ = "0.1.0"
