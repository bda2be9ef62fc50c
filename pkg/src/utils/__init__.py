"""
Utility modules for logging, timing, and seeding
"""
from .logging import get_logger, setup_logging
from .seeding import derive_seed, make_rng
from .timing import TimerContext

__all__ = ["setup_logging", "get_logger", "TimerContext", "derive_seed", "make_rng"]
