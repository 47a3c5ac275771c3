import numpy as np
import pytest

from src.domain.local.waypoint_queue import WaypointQueue, WaypointTag


@pytest.fixture
def queue() -> WaypointQueue:
    return WaypointQueue(reach_tolerance=0.2, min_spacing=0.4, expiry=10.0)


class TestWaypointQueue:
    def test_close_waypoints_merge_into_the_later_one(
        self, queue: WaypointQueue
    ) -> None:
        # Act
        queue.add((0.0, 0.0, 0.0))
        queue.add((0.1, 0.0, 0.0))
        queue.add((1.0, 0.0, 0.0))

        # Assert
        assert len(queue) == 2
        assert queue.upcoming()[0] == pytest.approx([0.1, 0.0, 0.0])

    def test_extend_tags_global_plan(self, queue: WaypointQueue) -> None:
        # Act
        queue.extend([(1.0, 0.0, 0.0), (2.0, 0.0, 0.0)])

        # Assert
        assert [item.tag for item in queue.items] == [WaypointTag.GLOBAL_PLAN] * 2
        assert len(queue.upcoming(1)) == 1

    def test_intermediate_goes_first_and_is_not_merged(
        self, queue: WaypointQueue
    ) -> None:
        # Arrange
        queue.add((5.0, 0.0, 0.0))

        # Act
        queue.insert_intermediate((0.0, 0.0, 0.0), time=0.0)

        # Assert
        front = queue.front()
        assert front is not None and front.tag == WaypointTag.INTERMEDIATE
        real = queue.next_real()
        assert real is not None and real.position == pytest.approx([5.0, 0, 0])
        assert queue.has_intermediate()

    def test_add_after_lone_intermediate_keeps_both(
        self, queue: WaypointQueue
    ) -> None:
        # Arrange
        queue.insert_intermediate((0.0, 0.0, 0.0), time=0.0)

        # Act
        queue.add((0.1, 0.0, 0.0))

        # Assert
        assert len(queue) == 2

    def test_update_pops_every_reached_waypoint(self, queue: WaypointQueue) -> None:
        # Arrange
        queue.extend([(0.0, 0.0, 0.0), (0.5, 0.0, 0.0), (3.0, 0.0, 0.0)])

        # Act
        removed = queue.update((0.1, 0.0, 0.0), time=1.0)
        queue.update((0.45, 0.0, 0.0), time=2.0)

        # Assert
        assert len(removed) == 1
        assert len(queue) == 1
        assert queue.upcoming()[0] == pytest.approx([3.0, 0.0, 0.0])

    def test_intermediate_expires_after_timeout(self, queue: WaypointQueue) -> None:
        # Arrange
        queue.add((5.0, 0.0, 0.0))
        queue.insert_intermediate((2.0, 2.0, 0.0), time=1.0)

        # Act
        early = queue.update((0.0, 0.0, 0.0), time=5.0)
        late = queue.update((0.0, 0.0, 0.0), time=11.0)

        # Assert
        assert early == []
        assert [item.tag for item in late] == [WaypointTag.INTERMEDIATE]
        assert not queue.has_intermediate()

    def test_intermediate_expires_once_next_waypoint_is_reachable(
        self, queue: WaypointQueue
    ) -> None:
        # Arrange
        queue.add((5.0, 0.0, 0.0))
        queue.insert_intermediate((2.0, 2.0, 0.0), time=0.0)

        # Act
        kept = queue.update((0, 0, 0), 1.0, reachable=lambda p: False)
        dropped = queue.update((0, 0, 0), 1.0, reachable=lambda p: p[0] > 4)

        # Assert
        assert kept == []
        assert len(dropped) == 1
        assert len(queue) == 1

    def test_discard_and_clear(self, queue: WaypointQueue) -> None:
        # Arrange
        queue.add((5.0, 0.0, 0.0))
        queue.insert_intermediate((1.0, 0.0, 0.0), time=0.0)

        # Act
        queue.discard_intermediates()

        # Assert
        assert len(queue) == 1
        assert not queue.has_intermediate()
        queue.clear()
        assert queue.front() is None
        assert queue.next_real() is None

    def test_zero_spacing_keeps_duplicates(self) -> None:
        # Arrange
        queue = WaypointQueue(reach_tolerance=0.1)

        # Act
        queue.extend(np.zeros((3, 3)))

        # Assert
        assert len(queue) == 3
