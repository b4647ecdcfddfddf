"""Euclidean space primitives: vectors, inner products, and closed convex sets.

Every set is given by an exact projection oracle plus a membership test.
All sets are immutable after construction and their oracles are pure, so
they can be shared freely across concurrent solves.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
import numpy as np

#: Default absolute tolerance for membership tests.
MEMBERSHIP_TOL = 1e-10


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array (defensive copy).

    Raises ``ValueError`` on NaN/Inf entries, on non 1-D input, and on a
    dimension mismatch when ``dim`` is given.
    """
    v = np.atleast_1d(np.asarray(x, dtype=float)).copy()
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"vector has non-finite entries: {v!r}")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.size}")
    return v


def inner(a, b) -> float:
    """Euclidean inner product <a, b>. Hard error on dimension mismatch."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch in inner product: {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


def norm(v) -> float:
    """Euclidean norm induced by :func:`inner`."""
    return float(np.linalg.norm(np.asarray(v, dtype=float)))


def _frozen_array(x, dim: int | None = None) -> np.ndarray:
    v = as_vector(x, dim)
    v.setflags(write=False)
    return v


def project_box(x, lo, hi) -> np.ndarray:
    """Componentwise clamp of ``x`` onto the box [lo, hi]."""
    x = as_vector(x)
    lo = as_vector(lo, x.size)
    hi = as_vector(hi, x.size)
    if np.any(lo > hi):
        raise ValueError(f"empty box: lo={lo} exceeds hi={hi}")
    return np.minimum(np.maximum(x, lo), hi)


def project_simplex(x) -> np.ndarray:
    """Euclidean projection onto the standard probability simplex.

    Uses the sort-and-shift rule: the projection is max(x - theta, 0) where
    theta is chosen so the positive part sums to one.
    """
    x = as_vector(x)
    u = np.sort(x)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, x.size + 1)
    rho = np.nonzero(u * ks > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(x - theta, 0.0)


class ConvexSet(ABC):
    """Nonempty closed convex set with an exact projection oracle.

    Attributes
    ----------
    dimension : int
        Ambient space dimension.
    kind : str
        Structural tag, one of ``whole-space``, ``box``, ``ball``,
        ``halfspace``, ``simplex``, ``affine-subspace``, ``intersection``.
    approximate : bool
        True when the projection is computed by an iterative scheme rather
        than a closed form (only the intersection fallback).
    """

    dimension: int
    kind: str
    approximate: bool = False

    @abstractmethod
    def project(self, x) -> np.ndarray:
        """Nearest point of the set to ``x``."""

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        """Membership test: distance from ``x`` to the set is at most ``tol``."""
        x = as_vector(x, self.dimension)
        return norm(x - self.project(x)) <= tol


@dataclass(frozen=True)
class WholeSpace(ConvexSet):
    """The ambient space itself; projection is the identity."""

    dimension: int
    kind: str = field(default="whole-space", init=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    def project(self, x) -> np.ndarray:
        return as_vector(x, self.dimension)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        as_vector(x, self.dimension)
        return True


@dataclass(frozen=True)
class Box(ConvexSet):
    """Axis-aligned box {x : lo <= x <= hi}."""

    lo: np.ndarray
    hi: np.ndarray
    kind: str = field(default="box", init=False)

    def __post_init__(self):
        object.__setattr__(self, "lo", _frozen_array(self.lo))
        object.__setattr__(self, "hi", _frozen_array(self.hi, self.lo.size))
        if np.any(self.lo > self.hi):
            raise ValueError(f"empty box: lo={self.lo} exceeds hi={self.hi}")

    @property
    def dimension(self) -> int:
        return self.lo.size

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dimension)
        return np.minimum(np.maximum(x, self.lo), self.hi)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = as_vector(x, self.dimension)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))


@dataclass(frozen=True)
class Ball(ConvexSet):
    """Closed Euclidean ball of given center and radius."""

    center: np.ndarray
    radius: float
    kind: str = field(default="ball", init=False)

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen_array(self.center))
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def dimension(self) -> int:
        return self.center.size

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dimension)
        d = x - self.center
        r = norm(d)
        if r <= self.radius:
            return x
        return self.center + (self.radius / r) * d

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = as_vector(x, self.dimension)
        return norm(x - self.center) <= self.radius + tol


@dataclass(frozen=True)
class Halfspace(ConvexSet):
    """Halfspace {x : <normal, x> <= offset}."""

    normal: np.ndarray
    offset: float
    kind: str = field(default="halfspace", init=False)

    def __post_init__(self):
        object.__setattr__(self, "normal", _frozen_array(self.normal))
        if norm(self.normal) == 0.0:
            raise ValueError("halfspace normal must be nonzero")

    @property
    def dimension(self) -> int:
        return self.normal.size

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dimension)
        excess = inner(self.normal, x) - self.offset
        if excess <= 0.0:
            return x
        return x - (excess / inner(self.normal, self.normal)) * self.normal

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = as_vector(x, self.dimension)
        return inner(self.normal, x) <= self.offset + tol * max(1.0, norm(self.normal))


@dataclass(frozen=True)
class Simplex(ConvexSet):
    """Standard probability simplex {x >= 0, sum x_i = 1}."""

    dimension: int
    kind: str = field(default="simplex", init=False)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    def project(self, x) -> np.ndarray:
        return project_simplex(as_vector(x, self.dimension))

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        x = as_vector(x, self.dimension)
        return bool(np.all(x >= -tol) and abs(float(np.sum(x)) - 1.0) <= tol * self.dimension)


@dataclass(frozen=True)
class AffineSubspace(ConvexSet):
    """Affine subspace {x : A x = b}; projection via the pseudoinverse of A."""

    A: np.ndarray
    b: np.ndarray
    kind: str = field(default="affine-subspace", init=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=float)
        if A.ndim != 2:
            raise ValueError("A must be a matrix")
        b = _frozen_array(self.b, A.shape[0])
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        pinv = np.linalg.pinv(A)
        pinv.setflags(write=False)
        object.__setattr__(self, "_pinv", pinv)

    @property
    def dimension(self) -> int:
        return self.A.shape[1]

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dimension)
        return x - self._pinv @ (self.A @ x - self.b)


@dataclass(frozen=True)
class IntersectionSet(ConvexSet):
    """Intersection of convex sets, projected by Dykstra's alternating scheme.

    The cyclic corrections make the limit the metric projection onto the
    intersection rather than an arbitrary intersection point.  The result is
    approximate: iteration stops once a full sweep moves the iterate by at
    most ``tol`` or after ``max_sweeps`` sweeps.
    """

    members: tuple
    tol: float = 1e-10
    max_sweeps: int = 10000
    kind: str = field(default="intersection", init=False)
    approximate: bool = field(default=True, init=False)

    def __post_init__(self):
        members = tuple(self.members)
        if len(members) < 1:
            raise ValueError("intersection needs at least one member set")
        dims = {m.dimension for m in members}
        if len(dims) != 1:
            raise ValueError(f"member sets disagree on dimension: {dims}")
        object.__setattr__(self, "members", members)

    @property
    def dimension(self) -> int:
        return self.members[0].dimension

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dimension)
        m = len(self.members)
        corrections = [np.zeros_like(x) for _ in range(m)]
        z = x.copy()
        for _ in range(self.max_sweeps):
            start = z.copy()
            moved = 0.0
            for i, s in enumerate(self.members):
                w = z + corrections[i]
                z = s.project(w)
                new_corr = w - z
                # the iterate alone can repeat across sweeps while the
                # corrections still evolve, so both must settle
                moved += norm(new_corr - corrections[i])
                corrections[i] = new_corr
            if norm(z - start) + moved <= self.tol:
                break
        return z

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        return all(s.contains(x, tol) for s in self.members)


def sample_points(C: ConvexSet, n: int, seed: int, scale: float = 2.0) -> np.ndarray:
    """Deterministic sample of ``n`` points of ``C``: project(gaussian).

    Draws N(0, scale^2 I) vectors with a seeded generator and projects each
    onto ``C``.  Returns an (n, d) array.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    raw = rng.normal(0.0, scale, size=(n, C.dimension))
    return np.array([C.project(r) for r in raw])
