"""Opponent defensive shape as vertical bands on the attacking axis.

Opponents are grouped by their x-coordinate into k contiguous bands. For
each candidate k the mean-silhouette-maximizing contiguous partition of
the sorted x-values is found by exact search (at most 11 opponents on a
pitch, so the search space is tiny), and k itself is selected by maximum
mean silhouette with ties broken toward smaller k. Contiguity in 1D is
not a restriction: any silhouette-optimal grouping of points on a line
is contiguous.

Conventions shared with the verification oracle (these define the model,
they are not implementation details): singleton clusters contribute a
silhouette of 0; a point whose intra- and nearest-other-cluster mean
distances are both 0 contributes 0; candidate partitions are scanned in
lexicographic boundary order and the first maximum wins.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import EmptyOpponentsError
from .geometry import PassVector, Point2, segment_intersects_band


@dataclass(frozen=True)
class ShapeConfig:
    """Knobs for defensive-shape clustering."""

    exclude_goalkeeper: bool = True
    k_candidates: tuple[int, ...] = (2, 3, 4)
    min_spread_m: float = 1.0
    linkage: str = "ward"  # reserved for future variants; sole accepted value

    def __post_init__(self) -> None:
        if self.linkage != "ward":
            raise ValueError(f"unsupported linkage {self.linkage!r}")
        if self.min_spread_m < 0:
            raise ValueError("min_spread_m must be >= 0")
        if any(k < 1 for k in self.k_candidates):
            raise ValueError("k candidates must be positive")


@dataclass(frozen=True)
class ClusterLine:
    """One vertical defensive band: centroid, y-span and its members."""

    cluster_id: int
    x_centroid: float
    y_min: float
    y_max: float
    member_ids: tuple[str, ...]


@dataclass(frozen=True)
class TeamShape:
    """All defensive bands at one instant, ordered by x-centroid."""

    lines: tuple[ClusterLine, ...]
    k: int
    silhouette: float | None = field(default=None)

    def member_partition(self) -> tuple[frozenset[str], ...]:
        return tuple(frozenset(line.member_ids) for line in self.lines)


def _partition_scores(xs_sorted: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Mean silhouette for every contiguous k-partition of sorted values.

    Returns (boundaries, scores) where boundaries has shape (m, k-1) in
    lexicographic order. Uses prefix sums; for a point the nearest other
    cluster by mean distance is always an adjacent band, since bands are
    contiguous on a line.
    """
    n = len(xs_sorted)
    bounds = np.array(list(combinations(range(1, n), k - 1)), dtype=np.int64)
    m = len(bounds)
    edges = np.empty((m, k + 1), dtype=np.int64)
    edges[:, 0] = 0
    edges[:, 1:k] = bounds
    edges[:, k] = n

    prefix = np.concatenate(([0.0], np.cumsum(xs_sorted)))
    idx = np.arange(n)
    # cluster index of each point under each partition: (m, n)
    cluster = (bounds[:, :, None] <= idx[None, None, :]).sum(axis=1)
    lo = np.take_along_axis(edges, cluster, axis=1)
    hi = np.take_along_axis(edges, cluster + 1, axis=1)
    size = hi - lo

    xi = xs_sorted[None, :]
    s_i = prefix[idx][None, :]
    s_lo = prefix[lo]
    s_hi = prefix[hi]
    intra = xi * (idx[None, :] - lo) - (s_i - s_lo) + (s_hi - s_i - xi * (hi - idx[None, :]))
    a = np.divide(intra, size - 1, out=np.zeros_like(intra), where=size > 1)

    has_left = cluster > 0
    llo = np.take_along_axis(edges, np.maximum(cluster - 1, 0), axis=1)
    left_size = np.maximum(lo - llo, 1)
    left_mean = (s_lo - prefix[llo]) / left_size
    b_left = np.where(has_left, xi - left_mean, np.inf)

    has_right = cluster < k - 1
    rhi = np.take_along_axis(edges, np.minimum(cluster + 2, k), axis=1)
    right_size = np.maximum(rhi - hi, 1)
    right_mean = (prefix[rhi] - s_hi) / right_size
    b_right = np.where(has_right, right_mean - xi, np.inf)

    b = np.minimum(b_left, b_right)
    denom = np.maximum(a, b)
    sil = np.divide(b - a, denom, out=np.zeros_like(a), where=denom > 0)
    sil = np.where(size == 1, 0.0, sil)
    return bounds, sil.mean(axis=1)


def _single_line(player_ids: list[str], xs: np.ndarray, ys: np.ndarray) -> TeamShape:
    line = ClusterLine(
        cluster_id=0,
        x_centroid=float(xs.mean()),
        y_min=float(ys.min()),
        y_max=float(ys.max()),
        member_ids=tuple(player_ids),
    )
    return TeamShape(lines=(line,), k=1, silhouette=None)


def cluster_team_shape(
    opponents: list[tuple[str, Point2]],
    config: ShapeConfig | None = None,
) -> TeamShape:
    """Partition opponents into vertical bands by x-coordinate.

    The caller is responsible for goalkeeper exclusion when
    ``config.exclude_goalkeeper`` is set; this function clusters exactly
    the positions it is given.
    """
    config = config or ShapeConfig()
    if not opponents:
        raise EmptyOpponentsError("cannot cluster an empty opponent list")

    ids = [pid for pid, _ in opponents]
    xs = np.array([p.x for _, p in opponents], dtype=np.float64)
    ys = np.array([p.y for _, p in opponents], dtype=np.float64)
    n = len(xs)

    if float(xs.max() - xs.min()) < config.min_spread_m:
        return _single_line(ids, xs, ys)

    order = np.argsort(xs, kind="stable")
    xs_sorted = xs[order]

    candidates = sorted({k for k in config.k_candidates if 2 <= k <= n})
    best_score = -np.inf
    best_k = 0
    best_bounds: tuple[int, ...] = ()
    for k in candidates:
        bounds, scores = _partition_scores(xs_sorted, k)
        i = int(np.argmax(scores))
        if scores[i] > best_score:
            best_score = float(scores[i])
            best_k = k
            best_bounds = tuple(int(b) for b in bounds[i])
    if best_k == 0:
        return _single_line(ids, xs, ys)

    edges = (0, *best_bounds, n)
    lines = []
    prev_centroid = -np.inf
    for c in range(best_k):
        members = order[edges[c] : edges[c + 1]]
        centroid = float(xs[members].mean())
        assert centroid > prev_centroid, "bands must have strictly increasing centroids"
        prev_centroid = centroid
        lines.append(
            ClusterLine(
                cluster_id=c,
                x_centroid=centroid,
                y_min=float(ys[members].min()),
                y_max=float(ys[members].max()),
                member_ids=tuple(ids[j] for j in members),
            )
        )
    return TeamShape(lines=tuple(lines), k=best_k, silhouette=best_score)


def count_lines_crossed(pass_vector: PassVector, shape: TeamShape) -> int:
    """Number of bands whose vertical segment the pass crosses."""
    return sum(
        segment_intersects_band(pass_vector, line.x_centroid, line.y_min, line.y_max)
        for line in shape.lines
    )


def crossed_cluster_ids(pass_vector: PassVector, shape: TeamShape) -> tuple[int, ...]:
    """Cluster ids of the bands the pass crosses, in centroid order."""
    return tuple(
        line.cluster_id
        for line in shape.lines
        if segment_intersects_band(pass_vector, line.x_centroid, line.y_min, line.y_max)
    )
