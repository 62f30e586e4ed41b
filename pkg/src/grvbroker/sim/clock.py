"""Virtual clock with a deterministic event queue."""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, List, Tuple

# equal-time ordering: deliveries finish, then measurements, then requests, then reranks
COMPLETION, MEASURE, REQUEST, RERANK = range(4)


@dataclass
class SimClock:
    now: float = 0.0
    _queue: List[Tuple[float, int, int, Callable[..., Any], tuple]] = field(default_factory=list)
    _seq: itertools.count = field(default_factory=itertools.count)

    def schedule(self, time: float, priority: int, action: Callable[..., Any], *args) -> None:
        if time < self.now:
            raise ValueError(f"cannot schedule at {time} before now={self.now}")
        heapq.heappush(self._queue, (time, priority, next(self._seq), action, args))

    def __len__(self):
        return len(self._queue)

    def step(self) -> bool:
        if not self._queue:
            return False
        time, _, _, action, args = heapq.heappop(self._queue)
        self.now = time
        action(*args)
        return True

    def run(self, until: float = float("inf")) -> None:
        while self._queue and self._queue[0][0] <= until:
            self.step()
