"""Scalar operators on membership degrees.

AND methods are t-norms, OR methods are s-norms. Implication shapes a
consequent curve by a rule activation, accumulation combines implicated
curves point-wise. All functions are pure; enum values double as the FCL
keywords used to select them.
"""

from __future__ import annotations

import enum


class AndMethod(enum.Enum):
    MIN = "MIN"
    PROD = "PROD"
    BDIF = "BDIF"


class OrMethod(enum.Enum):
    MAX = "MAX"
    ASUM = "ASUM"
    BSUM = "BSUM"


class ActivationMethod(enum.Enum):
    MIN = "MIN"
    PROD = "PROD"


class AccumulationMethod(enum.Enum):
    MAX = "MAX"
    BSUM = "BSUM"
    NSUM = "NSUM"
    SUM = "SUM"
    PROBOR = "PROBOR"


class DefuzzMethod(enum.Enum):
    COG = "COG"
    COGS = "COGS"
    COA = "COA"
    LM = "LM"
    RM = "RM"
    MM = "MM"


class Hedge(enum.Enum):
    NOT = "NOT"
    VERY = "VERY"
    SOMEWHAT = "SOMEWHAT"


def and_connect(a: float, b: float, method: AndMethod = AndMethod.MIN) -> float:
    """MIN -> min(a,b); PROD -> a*b; BDIF -> max(0, a+b-1)."""
    if method is AndMethod.MIN:
        return min(a, b)
    if method is AndMethod.PROD:
        return a * b
    return max(0.0, a + b - 1.0)


def or_connect(a: float, b: float, method: OrMethod = OrMethod.MAX) -> float:
    """MAX -> max(a,b); ASUM -> a+b-a*b; BSUM -> min(1, a+b)."""
    if method is OrMethod.MAX:
        return max(a, b)
    if method is OrMethod.ASUM:
        return a + b - a * b
    return min(1.0, a + b)


def apply_hedge(hedge: Hedge, a: float) -> float:
    """NOT -> 1-a; VERY -> a^2 (concentration); SOMEWHAT -> sqrt(a) (dilation)."""
    if hedge is Hedge.NOT:
        return 1.0 - a
    if hedge is Hedge.VERY:
        return a * a
    return a ** 0.5


def implicate(activation: float, mu: float, method: ActivationMethod = ActivationMethod.MIN) -> float:
    """Shape a consequent degree by a rule activation: MIN clips, PROD scales."""
    if method is ActivationMethod.MIN:
        return min(activation, mu)
    return activation * mu


def accumulate_pair(a: float, b: float, method: AccumulationMethod = AccumulationMethod.MAX) -> float:
    """Point-wise accumulation of two degrees.

    MAX -> max; BSUM -> min(1, a+b); NSUM -> (a+b)/max(1, a+b);
    SUM -> a+b (deliberately unclamped); PROBOR -> a+b-a*b.
    """
    if method is AccumulationMethod.MAX:
        return max(a, b)
    if method is AccumulationMethod.BSUM:
        return min(1.0, a + b)
    if method is AccumulationMethod.NSUM:
        s = a + b
        return s / max(1.0, s)
    if method is AccumulationMethod.SUM:
        return a + b
    return a + b - a * b
