"""Contact snapshots: who can talk to whom at one instant.

A snapshot carries both the true node positions (used for metric
accounting and link validity) and the predicted positions (used for
forwarding decisions).  Neighborhoods follow the unit-disk rule: an edge
exists iff the Euclidean distance is at most the transmission radius,
boundary inclusive.  Queries go through a uniform grid with cell size
equal to the radius, so only the 3x3 cell neighborhood must be scanned.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ContactSnapshot", "NetworkTrace", "TraceCursor"]


class _GridIndex:
    """Uniform-grid spatial index over a fixed (n, 2) position array."""

    def __init__(self, positions: np.ndarray, cell_size: float):
        self._cell = cell_size
        self._cells: dict[tuple[int, int], list[int]] = defaultdict(list)
        for i, (x, y) in enumerate(positions):
            self._cells[(int(math.floor(x / cell_size)),
                         int(math.floor(y / cell_size)))].append(i)

    def candidates(self, x: float, y: float) -> list[int]:
        cx = int(math.floor(x / self._cell))
        cy = int(math.floor(y / self._cell))
        out: list[int] = []
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                out.extend(self._cells.get((cx + dx, cy + dy), ()))
        return out


@dataclass(frozen=True)
class ContactSnapshot:
    """Immutable view of all node positions at one instant."""

    time: float
    true_positions: np.ndarray
    predicted_positions: np.ndarray
    comm_range: float
    _grids: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.true_positions) != len(self.predicted_positions):
            raise ValueError(
                "true and predicted position lists differ in length: "
                f"{len(self.true_positions)} vs {len(self.predicted_positions)}"
            )
        if self.comm_range <= 0.0:
            raise ValueError(f"comm_range must be > 0, got {self.comm_range!r}")

    @property
    def n_nodes(self) -> int:
        return len(self.true_positions)

    def positions(self, use_predicted: bool = False) -> np.ndarray:
        return self.predicted_positions if use_predicted else self.true_positions

    def _check_index(self, i: int) -> None:
        if not (0 <= i < self.n_nodes):
            raise IndexError(f"node index {i} out of range [0, {self.n_nodes})")

    def distance(self, i: int, j: int, use_predicted: bool = False) -> float:
        """Euclidean distance between nodes i and j on the selected positions."""
        self._check_index(i)
        self._check_index(j)
        pos = self.positions(use_predicted)
        return float(math.hypot(pos[i, 0] - pos[j, 0], pos[i, 1] - pos[j, 1]))

    def _grid(self, use_predicted: bool) -> _GridIndex:
        grid = self._grids.get(use_predicted)
        if grid is None:
            grid = _GridIndex(self.positions(use_predicted), self.comm_range)
            self._grids[use_predicted] = grid
        return grid

    def neighbors(self, i: int, use_predicted: bool = False) -> set[int]:
        """All nodes within comm_range of node i (excluding i itself)."""
        self._check_index(i)
        pos = self.positions(use_predicted)
        x, y = pos[i]
        r2 = self.comm_range * self.comm_range
        out = set()
        for j in self._grid(use_predicted).candidates(x, y):
            if j == i:
                continue
            dx = pos[j, 0] - x
            dy = pos[j, 1] - y
            if dx * dx + dy * dy <= r2:
                out.add(j)
        return out


@dataclass(frozen=True)
class NetworkTrace:
    """A recorded window of snapshots, one per time step."""

    snapshots: tuple[ContactSnapshot, ...]

    def __post_init__(self) -> None:
        if not self.snapshots:
            raise ValueError("trace must contain at least one snapshot")

    @property
    def n_steps(self) -> int:
        return len(self.snapshots) - 1

    def cursor(self) -> "TraceCursor":
        return TraceCursor(self)


class TraceCursor:
    """One session's clock over a recorded trace.

    Presents the time-evolving network interface (snapshot/advance) that
    the routing layer drives; several cursors can replay the same trace
    independently, which keeps algorithm comparisons on identical mobility.
    """

    def __init__(self, trace: NetworkTrace):
        self._trace = trace
        self._k = 0

    def snapshot(self) -> ContactSnapshot:
        return self._trace.snapshots[self._k]

    def advance(self) -> None:
        if self._k + 1 >= len(self._trace.snapshots):
            raise RuntimeError(
                f"trace exhausted after {self._trace.n_steps} steps"
            )
        self._k += 1
