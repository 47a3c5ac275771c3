import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence

import numpy as np

from src.domain.mapping.voxel_core import FloatArray

logger = logging.getLogger()


class WaypointTag(str, Enum):
    USER = "user"
    GLOBAL_PLAN = "global_plan"
    INTERMEDIATE = "intermediate"


@dataclass
class QueuedWaypoint:
    position: FloatArray
    tag: WaypointTag
    added_at: float


class WaypointQueue:
    """Ordered goals for the local planner.

    Consecutive non-intermediate waypoints closer than ``min_spacing`` are
    merged, keeping the later one. Intermediate waypoints sit at the front
    and expire once reached, once ``expiry`` seconds pass, or once the next
    real waypoint becomes reachable.
    """

    def __init__(
        self,
        reach_tolerance: float,
        min_spacing: float = 0.0,
        expiry: float = 30.0,
    ) -> None:
        self.reach_tolerance = reach_tolerance
        self.min_spacing = min_spacing
        self.expiry = expiry
        self._items: List[QueuedWaypoint] = []

    def __len__(self) -> int:
        return len(self._items)

    @property
    def items(self) -> List[QueuedWaypoint]:
        return list(self._items)

    def front(self) -> Optional[QueuedWaypoint]:
        return self._items[0] if self._items else None

    def upcoming(self, count: Optional[int] = None) -> List[FloatArray]:
        items = self._items if count is None else self._items[:count]
        return [item.position for item in items]

    def next_real(self) -> Optional[QueuedWaypoint]:
        for item in self._items:
            if item.tag != WaypointTag.INTERMEDIATE:
                return item
        return None

    def add(
        self,
        position: Sequence[float],
        tag: WaypointTag = WaypointTag.USER,
        time: float = 0.0,
    ) -> None:
        point = np.asarray(position, dtype=np.float64)
        if self._items and self.min_spacing > 0:
            last = self._items[-1]
            if (
                last.tag != WaypointTag.INTERMEDIATE
                and np.linalg.norm(last.position - point) < self.min_spacing
            ):
                self._items[-1] = QueuedWaypoint(point, tag, time)
                return
        self._items.append(QueuedWaypoint(point, tag, time))

    def extend(
        self,
        positions: Sequence[Sequence[float]],
        tag: WaypointTag = WaypointTag.GLOBAL_PLAN,
        time: float = 0.0,
    ) -> None:
        for position in positions:
            self.add(position, tag, time)

    def insert_intermediate(self, position: Sequence[float], time: float) -> None:
        point = np.asarray(position, dtype=np.float64)
        self._items.insert(0, QueuedWaypoint(point, WaypointTag.INTERMEDIATE, time))

    def has_intermediate(self) -> bool:
        return any(item.tag == WaypointTag.INTERMEDIATE for item in self._items)

    def update(
        self,
        position: Sequence[float],
        time: float,
        reachable: Optional[Callable[[FloatArray], bool]] = None,
    ) -> List[QueuedWaypoint]:
        """Drop reached or expired waypoints from the front; returns them."""
        here = np.asarray(position, dtype=np.float64)
        removed: List[QueuedWaypoint] = []
        while self._items:
            item = self._items[0]
            reached = np.linalg.norm(item.position - here) <= self.reach_tolerance
            expired = False
            if item.tag == WaypointTag.INTERMEDIATE:
                expired = time - item.added_at >= self.expiry
                following = self.next_real()
                if not expired and following is not None and reachable is not None:
                    expired = reachable(following.position)
            if not (reached or expired):
                break
            removed.append(self._items.pop(0))
        for item in removed:
            logger.debug(f"Dequeued {item.tag.value} waypoint {item.position.tolist()}")
        return removed

    def discard_intermediates(self) -> None:
        self._items = [
            item for item in self._items if item.tag != WaypointTag.INTERMEDIATE
        ]

    def clear(self) -> None:
        self._items.clear()
