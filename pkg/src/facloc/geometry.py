"""Geometric kernels shared by the mechanisms and the welfare oracles.

Points are bare tuples of floats: they hash, compare lexicographically and
survive JSON round trips without a wrapper class.  Everything here is pure.
The randomized enclosing-circle solver takes an explicit seed so callers
stay reproducible.
"""

from __future__ import annotations

import enum
import math
import random
from typing import Iterable, NamedTuple, Sequence

Point = tuple[float, ...]

# Distance below which two points are treated as the same location.
COINCIDENCE_EPS = 1e-12


class Metric(enum.Enum):
    """Distance kind used by a profile and everything derived from it."""

    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"


class Circle(NamedTuple):
    center: Point
    radius: float


class ConvergenceError(RuntimeError):
    """Iterative solver ran out of iterations.  Carries the best iterate."""

    def __init__(self, message: str, best: Point):
        super().__init__(message)
        self.best = best


def as_point(coords: Iterable[float]) -> Point:
    pt = tuple(float(c) for c in coords)
    if not pt:
        raise ValueError("a point needs at least one coordinate")
    if not all(math.isfinite(c) for c in pt):
        raise ValueError(f"point has non-finite coordinates: {pt!r}")
    return pt


def _validated(points: Iterable[Iterable[float]]) -> list[Point]:
    pts = [as_point(p) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise ValueError("points have mixed dimensions")
    return pts


def distance(a: Sequence[float], b: Sequence[float], metric: Metric = Metric.EUCLIDEAN) -> float:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    if metric is Metric.EUCLIDEAN:
        return math.dist(a, b)
    return sum(abs(x - y) for x, y in zip(a, b))


def bounding_box(points: Iterable[Iterable[float]]) -> tuple[Point, Point]:
    """Coordinate-wise (mins, maxs) of a nonempty point set."""
    pts = _validated(points)
    mins = tuple(min(p[k] for p in pts) for k in range(len(pts[0])))
    maxs = tuple(max(p[k] for p in pts) for k in range(len(pts[0])))
    return mins, maxs


def coordinate_median(points: Iterable[Iterable[float]], policy: str = "lower") -> Point:
    """Per-axis median.  Even counts take the lower (or upper) middle value,
    so the result is always one of the input coordinates on each axis."""
    pts = _validated(points)
    if policy not in ("lower", "upper"):
        raise ValueError(f"unknown even-count policy {policy!r}")
    n = len(pts)
    idx = (n - 1) // 2 if policy == "lower" else n // 2
    return tuple(sorted(p[k] for p in pts)[idx] for k in range(len(pts[0])))


def _pull_at(pts: list[Point], anchor: Point) -> tuple[int, list[float], float]:
    """Multiplicity of anchor among pts, net unit pull of the remaining
    points, and the sum of their inverse distances."""
    dim = len(anchor)
    multiplicity = 0
    pull = [0.0] * dim
    inv_sum = 0.0
    for p in pts:
        d = math.dist(p, anchor)
        if d <= COINCIDENCE_EPS:
            multiplicity += 1
            continue
        inv_sum += 1.0 / d
        for k in range(dim):
            pull[k] += (p[k] - anchor[k]) / d
    return multiplicity, pull, inv_sum


def _hessian_at(pts: list[Point], x: Point) -> list[list[float]]:
    """Hessian of the total-distance objective at x, skipping coincident
    points (their contribution is unbounded and handled separately)."""
    dim = len(x)
    h = [[0.0] * dim for _ in range(dim)]
    for p in pts:
        d = math.dist(p, x)
        if d <= COINCIDENCE_EPS:
            continue
        u = [(p[k] - x[k]) / d for k in range(dim)]
        for j in range(dim):
            for k in range(dim):
                h[j][k] += ((1.0 if j == k else 0.0) - u[j] * u[k]) / d
    return h


def _solve_linear(matrix: list[list[float]], rhs: list[float]) -> list[float] | None:
    """Gaussian elimination with partial pivoting; None on a singular pivot."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(a[r][col]))
        if a[piv][col] == 0.0:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(col + 1, n):
            fac = a[r][col] / a[col][col]
            for k in range(col, n + 1):
                a[r][k] -= fac * a[col][k]
    out = [0.0] * n
    for r in range(n - 1, -1, -1):
        s = a[r][n] - sum(a[r][k] * out[k] for k in range(r + 1, n))
        out[r] = s / a[r][r]
    return out


# a cap hit with steps already this small relative to the instance
# diameter is a genuine stall (optimum next to an input point, or a
# near-flat valley from close-to-collinear inputs), not under-iteration
_STALL_STEP_FRACTION = 1e-5
_POLISH_ROUNDS = 64
# net-pull excess below this certifies the answer: the value error is at
# most the excess times the instance diameter
_RESIDUAL_ACCEPT = 1e-6


def geometric_median(
    points: Iterable[Iterable[float]],
    tolerance: float = 1e-9,
    max_iterations: int = 10_000,
) -> Point:
    """Point minimizing the total Euclidean distance to the inputs.

    Weiszfeld iteration with the standard fix for iterates that land on an
    input point: the coincident point contributes no weight, and the step is
    damped by the ratio of its multiplicity to the net pull of the others.
    Input points are tested for optimality up front (net pull of the other
    points no larger than the multiplicity), which makes the result exact
    whenever the optimum sits on an input point.

    Near-degenerate instances (optimum next to an input point, near-flat
    valleys) make the step sizes decay sublinearly, so the iteration cap
    can fire while the iterate is already value-accurate.  Such stalls are
    finished off by damped Newton steps on the net-pull field, which keep
    working where line searches on the objective would drown in rounding
    noise, and accepted only when the net-pull residual certifies the
    value; anything else raises ConvergenceError.
    """
    pts = _validated(points)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    if len(pts) == 1:
        return pts[0]
    dim = len(pts[0])

    for anchor in dict.fromkeys(pts):
        multiplicity, pull, _ = _pull_at(pts, anchor)
        if math.hypot(*pull) <= multiplicity + 1e-12:
            return anchor

    x = tuple(sum(p[k] for p in pts) / len(pts) for k in range(dim))
    step = math.inf
    for _ in range(max_iterations):
        multiplicity = 0
        weight_sum = 0.0
        weighted = [0.0] * dim
        pull = [0.0] * dim
        for p in pts:
            d = math.dist(p, x)
            if d <= COINCIDENCE_EPS:
                multiplicity += 1
                continue
            w = 1.0 / d
            weight_sum += w
            for k in range(dim):
                weighted[k] += p[k] * w
                pull[k] += (p[k] - x[k]) * w * d * w  # (p-x)/d
        if weight_sum == 0.0:
            return x  # every input coincides with the iterate
        target = tuple(c / weight_sum for c in weighted)
        if multiplicity:
            r = math.hypot(*pull)
            if r <= multiplicity + 1e-12:
                return x
            beta = multiplicity / r
            x_new = tuple((1.0 - beta) * t + beta * c for t, c in zip(target, x))
        else:
            x_new = target
        step = math.dist(x, x_new)
        x = x_new
        if step < tolerance:
            return x

    mins, maxs = bounding_box(pts)
    scale = math.dist(mins, maxs) or 1.0
    if step <= _STALL_STEP_FRACTION * scale:
        for _ in range(_POLISH_ROUNDS):
            multiplicity, pull, _ = _pull_at(pts, x)
            excess = math.hypot(*pull) - multiplicity
            if excess <= 1e-12:
                return x
            if multiplicity:
                # parked exactly on a non-optimal input point: nudge off it
                norm = math.hypot(*pull)
                x = tuple(c + w / norm * (1e-9 * scale) for c, w in zip(x, pull))
                continue
            delta = _solve_linear(_hessian_at(pts, x), pull)
            if delta is None:
                break
            stepped = False
            t = 1.0
            for _ in range(40):
                cand = tuple(c + t * w for c, w in zip(x, delta))
                cand_mult, cand_pull, _ = _pull_at(pts, cand)
                if math.hypot(*cand_pull) - cand_mult < excess:
                    x = cand
                    stepped = True
                    break
                t *= 0.5
            if not stepped:
                break
        multiplicity, pull, _ = _pull_at(pts, x)
        if math.hypot(*pull) - multiplicity <= _RESIDUAL_ACCEPT:
            return x
    raise ConvergenceError(
        f"geometric median did not converge in {max_iterations} iterations", best=x
    )


# --- smallest enclosing circle (randomized incremental) ---------------------

_CONTAINS_EPS = 1 + 1e-14


def _contains(c: Circle, p: Point) -> bool:
    return math.dist(c.center, p) <= c.radius * _CONTAINS_EPS


def _diameter_circle(a: Point, b: Point) -> Circle:
    center = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    radius = max(math.dist(center, a), math.dist(center, b))
    return Circle(center, radius)


def _circumcircle(a: Point, b: Point, c: Point) -> Circle | None:
    # Work relative to the midpoint of the bounding box for stability.
    ox = (min(a[0], b[0], c[0]) + max(a[0], b[0], c[0])) / 2.0
    oy = (min(a[1], b[1], c[1]) + max(a[1], b[1], c[1])) / 2.0
    ax, ay = a[0] - ox, a[1] - oy
    bx, by = b[0] - ox, b[1] - oy
    cx, cy = c[0] - ox, c[1] - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0.0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
    center = (x, y)
    radius = max(math.dist(center, a), math.dist(center, b), math.dist(center, c))
    return Circle(center, radius)


def _cross(a: Point, b: Point, p: Point) -> float:
    return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])


def _circle_two_fixed(pts: list[Point], a: Point, b: Point) -> Circle:
    circ = _diameter_circle(a, b)
    left: Circle | None = None
    right: Circle | None = None
    for p in pts:
        if _contains(circ, p):
            continue
        side = _cross(a, b, p)
        c = _circumcircle(a, b, p)
        if c is None:
            continue
        lean = _cross(a, b, c.center)
        if side > 0.0 and (left is None or lean > _cross(a, b, left.center)):
            left = c
        elif side < 0.0 and (right is None or lean < _cross(a, b, right.center)):
            right = c
    if left is None and right is None:
        return circ
    if left is None:
        return right  # type: ignore[return-value]
    if right is None:
        return left
    return left if left.radius <= right.radius else right


def _circle_one_fixed(pts: list[Point], q: Point) -> Circle:
    circ = Circle(q, 0.0)
    for i, p in enumerate(pts):
        if _contains(circ, p):
            continue
        if circ.radius == 0.0:
            circ = _diameter_circle(q, p)
        else:
            circ = _circle_two_fixed(pts[: i + 1], q, p)
    return circ


def smallest_enclosing_circle(points: Iterable[Iterable[float]], seed: int = 0) -> Circle:
    """Smallest circle containing every input point (2-d only).

    Randomized incremental construction; expected linear time.  The shuffle
    is driven by the caller-supplied seed, so identical inputs give
    identical circles.
    """
    pts = _validated(points)
    if len(pts[0]) != 2:
        raise ValueError("smallest_enclosing_circle expects 2-d points")
    shuffled = list(pts)
    random.Random(seed).shuffle(shuffled)
    circ: Circle | None = None
    for i, p in enumerate(shuffled):
        if circ is None or not _contains(circ, p):
            circ = _circle_one_fixed(shuffled[: i + 1], p)
    assert circ is not None
    return circ


def manhattan_one_center(points: Iterable[Iterable[float]]) -> Point:
    """Point minimizing the maximum Manhattan distance to the inputs (2-d).

    Rotating 45 degrees turns Manhattan distance into Chebyshev distance,
    where the optimum is the center of the bounding box.
    """
    pts = _validated(points)
    if len(pts[0]) != 2:
        raise ValueError("manhattan_one_center expects 2-d points")
    us = [x + y for x, y in pts]
    vs = [x - y for x, y in pts]
    uc = (min(us) + max(us)) / 2.0
    vc = (min(vs) + max(vs)) / 2.0
    return ((uc + vc) / 2.0, (uc - vc) / 2.0)
