"""Membership function shapes.

Every shape maps a crisp value to a membership degree in [0, 1] and is an
immutable value object, so instances can be shared freely across threads.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from bisect import bisect_right
from dataclasses import dataclass


class MembershipFunction(ABC):
    """Base class for all membership shapes."""

    @abstractmethod
    def evaluate(self, x: float) -> float:
        """Membership degree of ``x``, always within [0, 1]."""

    @property
    def is_singleton(self) -> bool:
        return False

    @abstractmethod
    def defining_xs(self) -> tuple[float, ...]:
        """Location parameters, used to validate terms against a declared range."""

    def extent_xs(self) -> tuple[float, ...]:
        """X-coordinates spanning the shape, used for automatic range derivation."""
        return self.defining_xs()

    def __call__(self, x: float) -> float:
        return self.evaluate(x)


@dataclass(frozen=True)
class PiecewiseLinear(MembershipFunction):
    """Polygonal shape given as (x, degree) knots, strictly increasing in x.

    Between knots the degree is interpolated linearly; outside the outermost
    knots the first/last degree is held constant (plateau extension).
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(x), float(m)) for x, m in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise ValueError("point list must not be empty")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if not x0 < x1:
                raise ValueError(f"point x-coordinates must be strictly increasing, got {x0} then {x1}")
        for x, m in pts:
            if not 0.0 <= m <= 1.0:
                raise ValueError(f"membership degree {m} at x={x} outside [0, 1]")
        object.__setattr__(self, "_xs", tuple(p[0] for p in pts))

    def evaluate(self, x: float) -> float:
        pts = self.points
        if x <= pts[0][0]:
            return pts[0][1]
        if x >= pts[-1][0]:
            return pts[-1][1]
        i = bisect_right(self._xs, x)
        x0, m0 = pts[i - 1]
        x1, m1 = pts[i]
        return m0 + (x - x0) * (m1 - m0) / (x1 - x0)

    def defining_xs(self) -> tuple[float, ...]:
        return tuple(p[0] for p in self.points)


@dataclass(frozen=True)
class Singleton(MembershipFunction):
    """Full membership at exactly one point, zero elsewhere."""

    x: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))

    def evaluate(self, x: float) -> float:
        return 1.0 if x == self.x else 0.0

    @property
    def is_singleton(self) -> bool:
        return True

    def defining_xs(self) -> tuple[float, ...]:
        return (self.x,)


@dataclass(frozen=True)
class Triangular(MembershipFunction):
    """Triangle rising from a to peak b, falling to c; zero outside [a, c]."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "c", float(self.c))
        if not self.a <= self.b <= self.c:
            raise ValueError(f"triangle requires a <= b <= c, got ({self.a}, {self.b}, {self.c})")

    def evaluate(self, x: float) -> float:
        if x == self.b:
            return 1.0
        if x <= self.a or x >= self.c:
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.c - x) / (self.c - self.b)

    def defining_xs(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c)


@dataclass(frozen=True)
class Trapezoidal(MembershipFunction):
    """Trapeze with support [a, d] and plateau [b, c]."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for f in ("a", "b", "c", "d"):
            object.__setattr__(self, f, float(getattr(self, f)))
        if not self.a <= self.b <= self.c <= self.d:
            raise ValueError(
                f"trapeze requires a <= b <= c <= d, got ({self.a}, {self.b}, {self.c}, {self.d})"
            )

    def evaluate(self, x: float) -> float:
        if self.b <= x <= self.c:
            return 1.0
        if x <= self.a or x >= self.d:
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        return (self.d - x) / (self.d - self.c)

    def defining_xs(self) -> tuple[float, ...]:
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class Gaussian(MembershipFunction):
    """exp(-(x - mean)^2 / (2 sigma^2))"""

    mean: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def evaluate(self, x: float) -> float:
        t = (x - self.mean) / self.sigma
        return math.exp(-0.5 * t * t)

    def defining_xs(self) -> tuple[float, ...]:
        return (self.mean,)

    def extent_xs(self) -> tuple[float, ...]:
        return (self.mean - 4.0 * self.sigma, self.mean + 4.0 * self.sigma)


@dataclass(frozen=True)
class GeneralizedBell(MembershipFunction):
    """1 / (1 + |(x - mean) / a|^(2b))"""

    a: float
    b: float
    mean: float

    def __post_init__(self):
        for f in ("a", "b", "mean"):
            object.__setattr__(self, f, float(getattr(self, f)))
        if not self.a > 0.0:
            raise ValueError(f"width a must be positive, got {self.a}")
        if not self.b > 0.0:
            raise ValueError(f"slope b must be positive, got {self.b}")

    def evaluate(self, x: float) -> float:
        t = abs((x - self.mean) / self.a)
        try:
            return 1.0 / (1.0 + t ** (2.0 * self.b))
        except OverflowError:
            return 0.0

    def defining_xs(self) -> tuple[float, ...]:
        return (self.mean,)

    def extent_xs(self) -> tuple[float, ...]:
        return (self.mean - 4.0 * self.a, self.mean + 4.0 * self.a)


@dataclass(frozen=True)
class Sigmoidal(MembershipFunction):
    """1 / (1 + exp(-gain (x - center))); falling when gain is negative."""

    gain: float
    center: float

    def __post_init__(self):
        object.__setattr__(self, "gain", float(self.gain))
        object.__setattr__(self, "center", float(self.center))

    def evaluate(self, x: float) -> float:
        z = -self.gain * (x - self.center)
        if z >= 700.0:
            return 0.0
        if z <= -700.0:
            return 1.0
        return 1.0 / (1.0 + math.exp(z))

    def defining_xs(self) -> tuple[float, ...]:
        return (self.center,)

    def extent_xs(self) -> tuple[float, ...]:
        if self.gain == 0.0:
            return (self.center,)
        spread = 8.0 / abs(self.gain)
        return (self.center - spread, self.center + spread)
