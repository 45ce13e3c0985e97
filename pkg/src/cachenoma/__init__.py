"""Cache-aided NOMA: rate regions, brute-force SIC checks, and delivery-time minimization."""
from .model import (
    CacheCase,
    CacheConfig,
    ChannelState,
    DeliveryLoad,
    classify_cache_case,
    split_files,
)
from .regions import ALL_REGIONS, RegionId, achievable, rate_bounds
from .delivery import (
    min_delivery_time,
    noma_min_delivery_time,
    oma_min_delivery_time,
)

__version__ = "0.1.0"
