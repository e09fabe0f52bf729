"""Exact cardinality-constrained minimum-cost matching of label prototypes.

The assignment problem is solved as a min-cost flow

    source -> row i   (capacity M, cost 0)
    row i  -> col j   (capacity 1, cost c[i, j])
    col j  -> sink    (capacity 1, cost 0)

by successive shortest paths, pushing exactly K units. Each unit of flow
augments along a shortest residual path, so after k augmentations the flow
is a minimum-cost k-matching.

Ties are broken towards the lexicographically smallest sorted pair list.
This is encoded exactly with a secondary integer cost on each row->col
edge, ``-2**(N-1-rank)`` with ``rank = i*cols + j``; costs compare
lexicographically as (real cost, secondary) pairs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateInputError, FormatError, InfeasibleError
from .labels import FrequencyTable, LabeledMatrix, LabelId, filter_frequent_labels

ALL = "all"
HALF = "half"
EPS = 1e-12
BRUTE_FORCE_LIMIT = 36


@dataclass(frozen=True)
class MatchConfig:
    frequency_threshold: float = 0.01
    # int, ALL, HALF, or None: ceil(min/2) one-to-one, all targets when capacity > 1
    cardinality: int | str | None = None
    source_capacity: int = 1

    def __post_init__(self):
        if self.source_capacity < 1:
            raise ValueError("source_capacity must be >= 1")
        if isinstance(self.cardinality, int) and self.cardinality < 1:
            raise ValueError("cardinality must be a positive integer")
        if isinstance(self.cardinality, str) and self.cardinality not in (ALL, HALF):
            raise ValueError(f"unknown cardinality {self.cardinality!r}")

    def resolve(self, k_source: int, k_target: int) -> int:
        limit = min(k_target, self.source_capacity * k_source)
        if self.cardinality is None:
            return k_target if self.source_capacity > 1 else math.ceil(min(k_source, k_target) / 2)
        if self.cardinality == ALL:
            return limit
        if self.cardinality == HALF:
            return math.ceil(min(k_source, k_target) / 2)
        return int(self.cardinality)


@dataclass(frozen=True)
class Pair:
    source: LabelId
    target: LabelId
    sq_distance: float


@dataclass(frozen=True)
class Pairing:
    pairs: tuple[Pair, ...]

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def sources(self) -> list[LabelId]:
        return [p.source for p in self.pairs]

    @property
    def targets(self) -> list[LabelId]:
        return [p.target for p in self.pairs]

    @property
    def total(self) -> float:
        return float(sum(p.sq_distance for p in self.pairs))

    def as_map(self) -> dict[LabelId, LabelId]:
        """Target label -> source label."""
        return {p.target: p.source for p in self.pairs}

    def to_tsv(self) -> str:
        ordered = sorted(self.pairs, key=lambda p: (p.sq_distance, p.source, p.target))
        lines = [f"{p.source.language}\t{p.source.name}\t{p.target.language}\t{p.target.name}"
                 f"\t{p.sq_distance:.17g}" for p in ordered]
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_tsv(cls, text: str) -> "Pairing":
        pairs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 5:
                raise FormatError(f"expected 5 columns, got {len(cols)}", lineno)
            try:
                pairs.append(Pair(LabelId(cols[0], cols[1]), LabelId(cols[2], cols[3]),
                                  float(cols[4])))
            except ValueError as exc:
                raise FormatError(str(exc), lineno) from None
        return cls(tuple(pairs))


def build_cost_matrix(U: LabeledMatrix | np.ndarray, V: LabeledMatrix | np.ndarray) -> np.ndarray:
    """Squared Euclidean distances between every row of U and every row of V."""
    u = U.rows if isinstance(U, LabeledMatrix) else np.asarray(U, dtype=float)
    v = V.rows if isinstance(V, LabeledMatrix) else np.asarray(V, dtype=float)
    if u.ndim != 2 or v.ndim != 2 or u.shape[1] != v.shape[1]:
        raise ValueError(f"row dimension mismatch: {u.shape} vs {v.shape}")
    # explicit differences rather than the |u|^2 - 2uv + |v|^2 expansion,
    # which loses precision and can go slightly negative
    diff = u[:, None, :] - v[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _check_instance(cost, k: int, capacity: int) -> np.ndarray:
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.size == 0:
        raise ValueError("cost must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost entries must be finite")
    if np.any(cost < 0):
        raise ValueError("cost entries must be non-negative")
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    rows, cols = cost.shape
    if not 1 <= k <= min(cols, capacity * rows):
        raise InfeasibleError(
            f"cardinality {k} infeasible for {rows}x{cols} with capacity {capacity}")
    return cost


def solve_matching(cost, k: int, capacity: int = 1) -> list[tuple[int, int]]:
    """Minimum-cost set of exactly ``k`` (row, col) pairs.

    Each column is used at most once and each row at most ``capacity``
    times. Returns the pairs sorted by (row, col).
    """
    cost = _check_instance(cost, k, capacity)
    rows, cols = cost.shape
    n_cells = rows * cols
    eps = EPS * max(1.0, float(cost.max()))

    def less(a: tuple[float, int], b: tuple[float, int]) -> bool:
        if a[0] < b[0] - eps:
            return True
        if a[0] > b[0] + eps:
            return False
        return a[1] < b[1]

    src, sink = 0, rows + cols + 1
    n_nodes = rows + cols + 2
    head: list[list[int]] = [[] for _ in range(n_nodes)]
    to: list[int] = []
    cap: list[int] = []
    w_real: list[float] = []
    w_tie: list[int] = []

    def add_edge(a: int, b: int, c: int, real: float, tie: int):
        head[a].append(len(to))
        to.append(b), cap.append(c), w_real.append(real), w_tie.append(tie)
        head[b].append(len(to))
        to.append(a), cap.append(0), w_real.append(-real), w_tie.append(-tie)

    for i in range(rows):
        add_edge(src, 1 + i, capacity, 0.0, 0)
    cell_edge = {}
    for i in range(rows):
        for j in range(cols):
            cell_edge[i, j] = len(to)
            add_edge(1 + i, 1 + rows + j, 1, float(cost[i, j]), -(1 << (n_cells - 1 - (i * cols + j))))
    for j in range(cols):
        add_edge(1 + rows + j, sink, 1, 0.0, 0)

    for _ in range(k):
        # Bellman-Ford (queue form); residual graph has no negative cycles
        dist: list[tuple[float, int] | None] = [None] * n_nodes
        parent_edge = [-1] * n_nodes
        dist[src] = (0.0, 0)
        queue = deque([src])
        queued = [False] * n_nodes
        queued[src] = True
        relaxations = 0
        while queue:
            a = queue.popleft()
            queued[a] = False
            da = dist[a]
            for e in head[a]:
                if cap[e] <= 0:
                    continue
                b = to[e]
                cand = (da[0] + w_real[e], da[1] + w_tie[e])
                if dist[b] is None or less(cand, dist[b]):
                    dist[b] = cand
                    parent_edge[b] = e
                    if not queued[b]:
                        queued[b] = True
                        queue.append(b)
            relaxations += 1
            if relaxations > n_nodes * len(to) + 1:
                raise RuntimeError("negative cycle in residual graph")
        if dist[sink] is None:
            raise InfeasibleError(f"no augmenting path for cardinality {k}")
        b = sink
        while b != src:
            e = parent_edge[b]
            cap[e] -= 1
            cap[e ^ 1] += 1
            b = to[e ^ 1]

    return [cell for cell, e in sorted(cell_edge.items()) if cap[e] == 0]


def matching_cost(cost, pairs: Iterable[tuple[int, int]]) -> float:
    cost = np.asarray(cost, dtype=float)
    return float(sum(cost[i, j] for i, j in pairs))


def brute_force_matching(cost, k: int, capacity: int = 1) -> list[tuple[int, int]]:
    """Exhaustive search over all feasible pairings. Verification oracle only."""
    cost = _check_instance(cost, k, capacity)
    rows, cols = cost.shape
    if rows * cols > BRUTE_FORCE_LIMIT:
        raise ValueError(f"instance {rows}x{cols} too large for exhaustive search")
    c = cost.tolist()
    load = [0] * rows
    chosen: list[tuple[int, int]] = []
    best: list = [None, None]

    # depth-first over columns: each column takes one row or stays unmatched
    def visit(j: int, total: float):
        need = k - len(chosen)
        if need == 0:
            pairs = sorted(chosen)
            key = (total, pairs)
            if best[0] is None or key < best[0]:
                best[0], best[1] = key, pairs
            return
        if cols - j < need:
            return
        for i in range(rows):
            if load[i] < capacity:
                load[i] += 1
                chosen.append((i, j))
                visit(j + 1, total + c[i][j])
                chosen.pop()
                load[i] -= 1
        visit(j + 1, total)

    visit(0, 0.0)
    return best[1]


def match_labels(U: LabeledMatrix, V: LabeledMatrix, freq_s: FrequencyTable,
                 freq_t: FrequencyTable, cfg: MatchConfig = MatchConfig()) -> Pairing:
    """Pair frequent source labels with frequent target labels by head-row distance."""
    keep_s = filter_frequent_labels(freq_s, cfg.frequency_threshold)
    keep_t = filter_frequent_labels(freq_t, cfg.frequency_threshold)
    for kept, m, side in ((keep_s, U, "source"), (keep_t, V, "target")):
        missing = kept.difference(m.labels)
        if missing:
            raise DegenerateInputError(
                f"{side} weights lack rows for frequent labels {sorted(map(str, missing))}")
    src_labels = [lab for lab in U.labels if lab in keep_s]
    tgt_labels = [lab for lab in V.labels if lab in keep_t]
    if not src_labels or not tgt_labels:
        raise DegenerateInputError(
            f"no frequent labels left (source {len(src_labels)}, target {len(tgt_labels)})")
    Us, Vt = U.select(src_labels), V.select(tgt_labels)
    cost = build_cost_matrix(Us, Vt)
    k = cfg.resolve(len(src_labels), len(tgt_labels))
    pairs = solve_matching(cost, k, cfg.source_capacity)
    return Pairing(tuple(Pair(src_labels[i], tgt_labels[j], float(cost[i, j])) for i, j in pairs))


def pairing_rows(U: LabeledMatrix, V: LabeledMatrix,
                 pairing: Pairing | Sequence[Pair]) -> tuple[np.ndarray, np.ndarray]:
    """Row-aligned (U_p, V_p) for the given pairs, in pairing order."""
    pairs = list(pairing)
    return (U.select([p.source for p in pairs]).rows if pairs else np.zeros((0, U.dim)),
            V.select([p.target for p in pairs]).rows if pairs else np.zeros((0, V.dim)))
