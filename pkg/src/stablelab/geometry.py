"""Open sets, membership tests and compact exhaustions.

Every shape answers two vectorized queries:

* ``contains(points)`` — open-set membership (boundaries excluded);
* ``depth(points)`` — a lower bound on the distance to the complement,
  positive exactly on the set.  Exact for balls, intervals and boxes; for
  unions it is the max over members, which undershoots inside overlaps.
  The depth feeds the Brownian-bridge crossing correction and doubles as
  the analytic openness certificate (depth > 0 at any interior point).

Unbounded unions are truncated at a finite count ``n_max``; experiments
report the truncation and are expected to show stability in it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Domain",
    "FullSpace",
    "Ball",
    "Interval",
    "Box",
    "UnionOfBalls",
    "UnionOfIntervals",
    "Exhaustion",
    "shrinking_radius",
    "shrinking_ball_domain",
    "disjoint_shrinking_intervals",
    "standard_exhaustion",
]


def _pts(points, dim: int) -> np.ndarray:
    p = np.asarray(points, dtype=float)
    if p.ndim == 1:
        p = p[None, :]
    if p.shape[-1] != dim:
        raise ValueError(f"points have dimension {p.shape[-1]}, domain has {dim}")
    return p


class Domain:
    """Base class; subclasses set ``dim`` and implement ``depth``."""

    dim: int

    def depth(self, points) -> np.ndarray:
        raise NotImplementedError

    def contains(self, points) -> np.ndarray:
        return self.depth(points) > 0.0

    def contains_point(self, x) -> bool:
        return bool(self.contains(np.asarray(x, dtype=float).reshape(1, -1))[0])

    @property
    def is_bounded(self) -> bool:
        return True


@dataclass(frozen=True)
class FullSpace(Domain):
    dim: int

    def depth(self, points) -> np.ndarray:
        p = _pts(points, self.dim)
        return np.full(p.shape[0], np.inf)

    @property
    def is_bounded(self) -> bool:
        return False


@dataclass(frozen=True)
class Ball(Domain):
    center: tuple
    radius: float
    dim: int = field(init=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        if self.radius <= 0.0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", tuple(c))
        object.__setattr__(self, "dim", c.size)

    def depth(self, points) -> np.ndarray:
        p = _pts(points, self.dim)
        r = np.sqrt(((p - np.asarray(self.center)) ** 2).sum(axis=-1))
        return self.radius - r

    def contains(self, points) -> np.ndarray:
        # squared comparison, no sqrt on the hot path
        p = _pts(points, self.dim)
        r2 = ((p - np.asarray(self.center)) ** 2).sum(axis=-1)
        return r2 < self.radius**2


@dataclass(frozen=True)
class Interval(Domain):
    a: float
    b: float
    dim: int = field(init=False, default=1)

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"interval requires a < b, got ({self.a}, {self.b})")
        object.__setattr__(self, "dim", 1)

    def depth(self, points) -> np.ndarray:
        x = _pts(points, 1)[:, 0]
        return np.minimum(x - self.a, self.b - x)

    def side_depths(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Distances to the lower and upper endpoint (for two-sided bridges)."""
        x = _pts(points, 1)[:, 0]
        return x - self.a, self.b - x


@dataclass(frozen=True)
class Box(Domain):
    lo: tuple
    hi: tuple
    dim: int = field(init=False)

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("box requires lo < hi componentwise")
        object.__setattr__(self, "lo", tuple(lo))
        object.__setattr__(self, "hi", tuple(hi))
        object.__setattr__(self, "dim", lo.size)

    def depth(self, points) -> np.ndarray:
        p = _pts(points, self.dim)
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.minimum(p - lo, hi - p).min(axis=-1)


@dataclass(frozen=True)
class UnionOfBalls(Domain):
    """Finite union of open balls (infinite families enter truncated).

    When all centers sit on the integer lattice of the first axis (the
    shrinking-ball family does), membership only consults the few balls
    whose center is within max-radius of round(x_1); this keeps the
    per-step cost flat in the truncation count.
    """

    centers: np.ndarray
    radii: np.ndarray
    dim: int = field(init=False)
    _lattice: bool = field(init=False, default=False)

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.centers, dtype=float))
        r = np.atleast_1d(np.asarray(self.radii, dtype=float))
        if c.shape[0] != r.size or c.shape[0] < 1:
            raise ValueError("need one radius per center")
        if np.any(r <= 0.0):
            raise ValueError("ball radii must be positive")
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "dim", c.shape[1])
        first = c[:, 0]
        lattice = (
            np.allclose(first, np.round(first))
            and np.allclose(first, first[0] + np.arange(c.shape[0]))
            and (c.shape[1] == 1 or np.allclose(c[:, 1:], 0.0))
        )
        object.__setattr__(self, "_lattice", bool(lattice))

    @property
    def n_balls(self) -> int:
        return self.centers.shape[0]

    def depth(self, points) -> np.ndarray:
        p = _pts(points, self.dim)
        if self._lattice:
            return self._depth_lattice(p)
        d = self.radii[None, :] - np.sqrt(
            ((p[:, None, :] - self.centers[None, :, :]) ** 2).sum(axis=-1)
        )
        return d.max(axis=1)

    def _depth_lattice(self, p: np.ndarray) -> np.ndarray:
        first0 = self.centers[0, 0]
        span = int(math.ceil(float(self.radii.max()))) + 1
        idx0 = np.rint(p[:, 0] - first0).astype(int)
        rest2 = (p[:, 1:] ** 2).sum(axis=-1) if self.dim > 1 else 0.0
        best = np.full(p.shape[0], -np.inf)
        for k in range(-span, span + 1):
            j = idx0 + k
            ok = (j >= 0) & (j < self.n_balls)
            jj = np.clip(j, 0, self.n_balls - 1)
            dist = np.sqrt((p[:, 0] - (first0 + jj)) ** 2 + rest2)
            cand = np.where(ok, self.radii[jj] - dist, -np.inf)
            np.maximum(best, cand, out=best)
        return best


@dataclass(frozen=True)
class UnionOfIntervals(Domain):
    """Finite union of open intervals on the line, kept sorted by left end."""

    segments: np.ndarray
    dim: int = field(init=False, default=1)

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.segments, dtype=float))
        if s.shape[1] != 2 or np.any(s[:, 0] >= s[:, 1]):
            raise ValueError("segments must be rows (a, b) with a < b")
        s = s[np.argsort(s[:, 0])]
        object.__setattr__(self, "segments", s)
        object.__setattr__(self, "dim", 1)

    @property
    def n_intervals(self) -> int:
        return self.segments.shape[0]

    def depth(self, points) -> np.ndarray:
        x = _pts(points, 1)[:, 0]
        d = np.minimum(
            x[:, None] - self.segments[None, :, 0],
            self.segments[None, :, 1] - x[:, None],
        )
        return d.max(axis=1)


@dataclass(frozen=True)
class _Intersection(Domain):
    """Intersection of two domains; used by exhaustions of composite sets."""

    left: Domain
    right: Domain
    dim: int = field(init=False)

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise ValueError("dimension mismatch in intersection")
        object.__setattr__(self, "dim", self.left.dim)

    def depth(self, points) -> np.ndarray:
        return np.minimum(self.left.depth(points), self.right.depth(points))


@dataclass(frozen=True)
class Exhaustion:
    """Increasing bounded open subsets U_1 in U_2 in ... of a parent domain."""

    parent: Domain
    levels: tuple

    def __post_init__(self):
        if len(self.levels) < 1:
            raise ValueError("exhaustion needs at least one level")
        object.__setattr__(self, "levels", tuple(self.levels))

    def __len__(self) -> int:
        return len(self.levels)

    def __getitem__(self, k) -> Domain:
        return self.levels[k]

    def check_nested(self, points) -> bool:
        """Monotone inclusion on probe points: x in U_k implies x in U_{k+1}."""
        for lo, hi in zip(self.levels[:-1], self.levels[1:]):
            inside = lo.contains(points)
            if not np.all(hi.contains(points)[inside]):
                return False
        return True

    def level_containing(self, x) -> int | None:
        """Smallest level index containing x, or None if uncovered."""
        for k, lvl in enumerate(self.levels):
            if lvl.contains_point(x):
                return k
        return None


def shrinking_radius(n) -> np.ndarray:
    """Radius r_n = (log log(n + 3))^(-1/2) of the n-th shrinking ball."""
    n = np.asarray(n, dtype=float)
    return np.log(np.log(n + 3.0)) ** -0.5


def shrinking_ball_domain(d: int, n_max: int) -> Domain:
    """Union of balls B(e_n, r_n), e_n = (n, 0, ..., 0), truncated at n_max.

    The radii r_n = (log log(n+3))^(-1/2) decrease to zero, so the mean exit
    time from far-out balls vanishes, yet slowly enough that the heat trace
    of the union diverges.  Note r_n > 1/2 for every n reachable at desk
    scale, so consecutive balls overlap and the truncated set is connected.
    In d = 1 the same construction is returned as a union of intervals
    (n - r_n, n + r_n); overlapping segments are kept as given.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    ns = np.arange(1, n_max + 1)
    radii = shrinking_radius(ns)
    if d == 1:
        segs = np.column_stack([ns - radii, ns + radii])
        return UnionOfIntervals(segs)
    centers = np.zeros((n_max, d))
    centers[:, 0] = ns
    return UnionOfBalls(centers, radii)


def disjoint_shrinking_intervals(
    n_max: int, decay: float = 0.42, half0: float = 0.5
) -> UnionOfIntervals:
    """Disjoint 1D family (n - l_n, n + l_n) with l_n = half0 * n^(-decay).

    The shrinking-ball radii r_n stay above 1/2 at any reachable n, so on
    the line the segments merge into one long interval and the exit-time
    bound never shrinks.  This family keeps the two phenomena visible at
    desk scale: half-lengths decay like a small power (exit bound -> 0)
    while the heat trace still grows without saturating as n_max doubles.
    Defaults keep segments disjoint (half0 + half0*2^-decay < 1).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if not (0.0 < decay < 0.5):
        raise ValueError("decay must lie in (0, 0.5) for trace growth")
    ns = np.arange(1, n_max + 1, dtype=float)
    half = half0 * ns**-decay
    if half[0] + half0 * 2.0**-decay >= 1.0:
        raise ValueError("half0 too large: consecutive segments would overlap")
    return UnionOfIntervals(np.column_stack([ns - half, ns + half]))


def standard_exhaustion(
    domain: Domain, m: int, radius_step: float = 1.0
) -> Exhaustion:
    """Levels U_k = domain intersected with the centered ball of radius k*step.

    For the full space the levels are returned as plain balls (intervals in
    d = 1); composite domains get intersection wrappers.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    levels = []
    for k in range(1, m + 1):
        r = k * radius_step
        if domain.dim == 1:
            core: Domain = Interval(-r, r)
        else:
            core = Ball((0.0,) * domain.dim, r)
        if isinstance(domain, FullSpace):
            levels.append(core)
        else:
            levels.append(_Intersection(domain, core))
    return Exhaustion(parent=domain, levels=tuple(levels))


def contains(domain: Domain, x) -> bool:
    """Open-set membership of a single point (boundary excluded)."""
    return domain.contains_point(x)
