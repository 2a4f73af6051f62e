"""Flat-array storage for search trees over space-time states.

One store can hold a single rooted tree or a whole forest (several roots,
distinguished by `root_id`).  Nodes are never physically removed; pruning
clears the `alive` flag so indices stay stable.  Nearest-neighbor queries
are linear scans — the directional distance is asymmetric, which rules out
standard metric indexes.
"""

import math
from enum import IntEnum

import numpy as np

from .spacetime import SpaceTimeSpace, SpaceTimeState, directional_dists


class ExtendStatus(IntEnum):
    TRAPPED = 0
    ADVANCED = 1
    REACHED = 2


class TreeStore:
    """Growable arrays of nodes with parent links and per-node root labels.

    `forward=True` stores trees growing forward in time (distance queries
    run node -> query); `forward=False` stores trees growing backward
    (query -> node).
    """

    def __init__(self, space: SpaceTimeSpace, forward: bool, capacity: int = 256):
        self.space = space
        self.forward = forward
        self.n = 0
        self._q = np.empty((capacity, space.dim))
        self._t = np.empty(capacity)
        self._parent = np.full(capacity, -1, dtype=np.int64)
        self._root_id = np.full(capacity, -1, dtype=np.int64)
        self._root_time = np.empty(capacity)
        self._alive = np.zeros(capacity, dtype=bool)
        self.children: list[list[int]] = []

    # -- array views over the used prefix ---------------------------------
    @property
    def q(self) -> np.ndarray:
        return self._q[: self.n]

    @property
    def t(self) -> np.ndarray:
        return self._t[: self.n]

    @property
    def parent(self) -> np.ndarray:
        return self._parent[: self.n]

    @property
    def root_id(self) -> np.ndarray:
        return self._root_id[: self.n]

    @property
    def root_time(self) -> np.ndarray:
        return self._root_time[: self.n]

    @property
    def alive(self) -> np.ndarray:
        return self._alive[: self.n]

    def _grow(self):
        cap = self._q.shape[0] * 2
        self._q = np.concatenate([self._q, np.empty_like(self._q)])
        self._t = np.concatenate([self._t, np.empty_like(self._t)])
        self._parent = np.concatenate([self._parent, np.full(cap // 2, -1, dtype=np.int64)])
        self._root_id = np.concatenate([self._root_id, np.full(cap // 2, -1, dtype=np.int64)])
        self._root_time = np.concatenate([self._root_time, np.empty(cap // 2)])
        self._alive = np.concatenate([self._alive, np.zeros(cap // 2, dtype=bool)])

    def add(self, x: SpaceTimeState, parent: int) -> int:
        """Append a node; parent=-1 makes it the root of a new tree."""
        if self.n == self._q.shape[0]:
            self._grow()
        i = self.n
        self._q[i] = x.q
        self._t[i] = x.t
        self._parent[i] = parent
        if parent < 0:
            self._root_id[i] = i
            self._root_time[i] = x.t
        else:
            if not self._alive[parent]:
                raise ValueError("cannot attach a node to a pruned parent")
            self._root_id[i] = self._root_id[parent]
            self._root_time[i] = self._root_time[parent]
            self.children[parent].append(i)
        self._alive[i] = True
        self.children.append([])
        self.n += 1
        return i

    def state(self, i: int) -> SpaceTimeState:
        return SpaceTimeState(self._q[i], self._t[i])

    def alive_count(self) -> int:
        return int(np.count_nonzero(self.alive))

    def alive_roots(self) -> np.ndarray:
        idx = np.nonzero(self.alive & (self.parent == -1))[0]
        return idx

    def dists_to(self, x: SpaceTimeState, from_tree: bool | None = None) -> np.ndarray:
        """Directional distance between every node and `x`, infinity for dead
        nodes.

        `from_tree=True` measures node -> x, `from_tree=False` measures
        x -> node.  The default matches the direction this store extends in:
        forward trees reach out to later states, backward trees are entered
        from earlier states.
        """
        if from_tree is None:
            from_tree = self.forward
        d = directional_dists(self.q, self.t, x, self.space, reverse=not from_tree)
        d[~self.alive] = np.inf
        return d

    def nearest(self, x: SpaceTimeState) -> tuple[int, float]:
        """Closest alive node able to connect with `x`; (-1, inf) if none."""
        if self.n == 0:
            return -1, math.inf
        d = self.dists_to(x)
        i = int(np.argmin(d))
        di = float(d[i])
        if math.isinf(di):
            return -1, math.inf
        return i, di

    def nearest_symmetric(self, x: SpaceTimeState, lam: float) -> tuple[int, float]:
        """Closest alive node under the unconstrained symmetric blend of
        configuration distance and absolute time difference."""
        if self.n == 0:
            return -1, math.inf
        dq = self.q - x.q[None, :]
        d = lam * np.sqrt(np.einsum("ij,ij->i", dq, dq)) + (1.0 - lam) * np.abs(self.t - x.t)
        d[~self.alive] = np.inf
        i = int(np.argmin(d))
        if not np.isfinite(d[i]):
            return -1, math.inf
        return i, float(d[i])

    def k_nearest(self, x: SpaceTimeState, k: int, from_tree: bool | None = None) -> np.ndarray:
        """Indices of up to `k` alive nodes closest to `x` (finite only)."""
        if self.n == 0 or k <= 0:
            return np.empty(0, dtype=np.int64)
        d = self.dists_to(x, from_tree=from_tree)
        finite = np.isfinite(d)
        if not finite.any():
            return np.empty(0, dtype=np.int64)
        idx = np.nonzero(finite)[0]
        if idx.shape[0] > k:
            part = np.argpartition(d[idx], k - 1)[:k]
            idx = idx[part]
        return idx[np.argsort(d[idx], kind="stable")]

    def subtree_indices(self, i: int) -> list[int]:
        """All nodes below and including `i` (alive or not)."""
        out = [i]
        stack = [i]
        while stack:
            j = stack.pop()
            for c in self.children[j]:
                out.append(c)
                stack.append(c)
        return out

    def reroot_subtree(self, i: int, root_id: int, root_time: float):
        """Relabel `i` and its descendants as members of another tree."""
        for j in self.subtree_indices(i):
            self._root_id[j] = root_id
            self._root_time[j] = root_time

    def set_parent(self, i: int, new_parent: int):
        old = self._parent[i]
        if old >= 0:
            self.children[old].remove(i)
        self._parent[i] = new_parent
        if new_parent >= 0:
            self.children[new_parent].append(i)

    def kill_mask(self, mask: np.ndarray) -> int:
        """Clear alive flags where `mask` holds; returns how many died."""
        doomed = self.alive & mask
        count = int(np.count_nonzero(doomed))
        self._alive[: self.n][doomed] = False
        return count

    def path_to_root(self, i: int) -> list[int]:
        out = [i]
        while self._parent[out[-1]] >= 0:
            out.append(int(self._parent[out[-1]]))
        return out
