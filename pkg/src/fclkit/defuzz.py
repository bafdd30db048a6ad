"""Defuzzification: turn an aggregated output curve into one crisp number.

Continuous methods sample the curve on a uniform grid over the variable's
universe and integrate with the trapezoidal rule:

  COG  centre of gravity, integral(x u) / integral(u)
  COA  centre of area, the x splitting the area in equal halves
  LM   leftmost grid point attaining the curve maximum
  RM   rightmost grid point attaining the curve maximum
  MM   midpoint of LM and RM

COGS is the discrete centre of gravity over singleton terms weighted by
their net activations. When nothing fired (or the curve has zero area) the
declared default value is returned; without one, an error is raised.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .operators import DefuzzMethod

if TYPE_CHECKING:  # pragma: no cover
    from .engine import AggregatedOutput

DEFAULT_SAMPLES = 1000


class EvaluationError(Exception):
    """Inference could not produce a crisp value."""


class NoRulesFiredError(EvaluationError):
    """All rule activations for an output were zero and no default exists."""


def uniform_grid(lo: float, hi: float, samples: int) -> list[float]:
    step = (hi - lo) / (samples - 1)
    xs = [lo + i * step for i in range(samples)]
    xs[-1] = hi  # guard against accumulated rounding on the last point
    return xs


def defuzzify(
    agg: "AggregatedOutput",
    method: DefuzzMethod,
    samples: int = DEFAULT_SAMPLES,
    default: float | None = None,
) -> float:
    """Crisp value of an aggregated output via ``method``.

    Raises EvaluationError for structurally impossible requests (COGS over
    non-singleton terms, mixed term kinds) and NoRulesFiredError when there
    is nothing to defuzzify and no default value.
    """
    if samples < 2:
        raise ValueError(f"samples must be at least 2, got {samples}")

    def fallback(reason: str) -> float:
        if default is not None:
            return default
        if not agg.fired:
            raise NoRulesFiredError(
                f"no rules fired for output variable {agg.variable!r} and no DEFAULT declared"
            )
        raise EvaluationError(f"{reason} for output variable {agg.variable!r} and no DEFAULT declared")

    if method is DefuzzMethod.COGS:
        bad = [c.term for c in agg.components if not c.mf.is_singleton]
        if bad:
            raise EvaluationError(
                f"COGS requires singleton terms only; {agg.variable!r} has polygonal terms {bad}"
            )
        total = sum(c.activation for c in agg.components)
        if total <= 0.0:
            return fallback("zero total activation")
        return sum(c.mf.x * c.activation for c in agg.components) / total

    kinds = {c.mf.is_singleton for c in agg.components}
    if kinds == {True, False}:
        raise EvaluationError(
            f"continuous defuzzification over mixed singleton/polygonal terms of {agg.variable!r}"
        )

    lo, hi = agg.universe
    xs = uniform_grid(lo, hi, samples)
    ys = [agg.membership(x) for x in xs]

    if method in (DefuzzMethod.LM, DefuzzMethod.RM, DefuzzMethod.MM):
        ymax = max(ys)
        if ymax <= 0.0:
            return fallback("flat zero curve")
        left = xs[ys.index(ymax)]
        right = xs[len(ys) - 1 - ys[::-1].index(ymax)]
        if method is DefuzzMethod.LM:
            return left
        if method is DefuzzMethod.RM:
            return right
        return 0.5 * (left + right)

    dx = (hi - lo) / (samples - 1)
    if method is DefuzzMethod.COG:
        area = 0.0
        moment = 0.0
        for i in range(samples - 1):
            area += 0.5 * (ys[i] + ys[i + 1]) * dx
            moment += 0.5 * (xs[i] * ys[i] + xs[i + 1] * ys[i + 1]) * dx
        if area <= 0.0:
            return fallback("zero total area")
        return moment / area

    if method is DefuzzMethod.COA:
        cumulative = [0.0]
        for i in range(samples - 1):
            cumulative.append(cumulative[-1] + 0.5 * (ys[i] + ys[i + 1]) * dx)
        total = cumulative[-1]
        if total <= 0.0:
            return fallback("zero total area")
        half = 0.5 * total
        for i in range(1, samples):
            if cumulative[i] >= half:
                span = cumulative[i] - cumulative[i - 1]
                if span <= 0.0:
                    return xs[i]
                return xs[i - 1] + (half - cumulative[i - 1]) / span * dx
        return xs[-1]

    raise ValueError(f"unknown defuzzification method {method!r}")
