"""
Wall-clock timing helpers
"""
import time


class TimerContext:
    """Context manager for timing operations"""

    def __init__(self):
        self.start_time = None
        self.end_time = None
        self.seconds = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.end_time = time.perf_counter()
        self.seconds = self.end_time - self.start_time
        return False

    @property
    def duration_ms(self) -> int:
        return int(self.seconds * 1000)
