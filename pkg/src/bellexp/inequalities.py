"""Bell-type inequalities over three correlation values.

``bell_original`` is the three-setting inequality
``|P(a,b) - P(a,c)| <= 1 + P(b,c)`` that any local hidden-variable model
with perfectly anticorrelated outcomes obeys. ``generalized_bell`` is the
weaker ``|P(a,b) - P(a,c)| <= 3 - |P(b,c)|``, which follows from each
correlation lying in ``[-1, 1]`` and therefore holds for every quantum state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

from .lhv import CorrelationEstimate, HiddenVariableModel, IntegrationConfig, lhv_correlation
from .quantum import qm_correlation, qm_correlation_density
from .spin import DensityMatrix, Direction, TwoQubitState

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    margin: float
    inputs: tuple[float, ...]
    tolerance: float
    source: str = ""

    def as_row(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "satisfied": self.satisfied,
            "source": self.source,
        }


def _check_inputs(name, values, tolerance):
    for v in values:
        if not math.isfinite(v) or abs(v) > 1.0 + tolerance:
            raise ValueError(f"{name}: correlation {v!r} outside [-1, 1]")


def _report(name, lhs, rhs, inputs, tolerance, source):
    margin = rhs - lhs
    return InequalityReport(
        name=name,
        lhs=lhs,
        rhs=rhs,
        satisfied=margin >= -tolerance,
        margin=margin,
        inputs=tuple(inputs),
        tolerance=tolerance,
        source=source,
    )


def bell_original(p_ab, p_ac, p_bc, tolerance=DEFAULT_TOLERANCE, source="") -> InequalityReport:
    inputs = (float(p_ab), float(p_ac), float(p_bc))
    _check_inputs("bell_original", inputs, tolerance)
    return _report("bell_original", abs(inputs[0] - inputs[1]), 1.0 + inputs[2], inputs, tolerance, source)


def generalized_bell(p_ab, p_ac, p_bc, tolerance=DEFAULT_TOLERANCE, source="") -> InequalityReport:
    inputs = (float(p_ab), float(p_ac), float(p_bc))
    _check_inputs("generalized_bell", inputs, tolerance)
    return _report(
        "generalized_bell", abs(inputs[0] - inputs[1]), 3.0 - abs(inputs[2]), inputs, tolerance, source
    )


@dataclass(frozen=True)
class BoundReport:
    """Per-value range flags plus the three-term composite.

    ``composite`` is ``|p0 - p1| + |p2|`` over the first three values and is
    ``None`` when fewer than three are given.
    """

    values: tuple[float, ...]
    in_bounds: tuple[bool, ...]
    composite: float | None
    composite_bound: float = 3.0
    tolerance: float = DEFAULT_TOLERANCE
    composite_ok: bool | None = field(default=None)

    @property
    def all_in_bounds(self) -> bool:
        return all(self.in_bounds)


def bound_check(correlations, tolerance=DEFAULT_TOLERANCE) -> BoundReport:
    values = tuple(float(v) for v in correlations)
    flags = tuple(-1.0 - tolerance <= v <= 1.0 + tolerance for v in values)
    composite = None
    ok = None
    if len(values) >= 3:
        composite = abs(values[0] - values[1]) + abs(values[2])
        ok = composite <= 3.0 + tolerance
    return BoundReport(values, flags, composite, 3.0, tolerance, ok)


def chsh(p_ab, p_ab2, p_a2b, p_a2b2, tolerance=DEFAULT_TOLERANCE, source="") -> InequalityReport:
    """Extension: four-setting ``|E(a,b) - E(a,b') + E(a',b) + E(a',b')| <= 2``.

    Not part of the three-setting suite run by :func:`evaluate_all`.
    """
    inputs = (float(p_ab), float(p_ab2), float(p_a2b), float(p_a2b2))
    _check_inputs("chsh", inputs, tolerance)
    lhs = abs(inputs[0] - inputs[1] + inputs[2] + inputs[3])
    return _report("chsh", lhs, 2.0, inputs, tolerance, source)


def source_name(source) -> str:
    if isinstance(source, HiddenVariableModel):
        return f"lhv:{source.name}"
    if isinstance(source, DensityMatrix):
        return "density"
    if isinstance(source, TwoQubitState):
        return "state"
    return type(source).__name__


def correlation(source, a: Direction, b: Direction, cfg: IntegrationConfig | None = None):
    """Correlation of ``source`` at ``(a, b)`` as a :class:`CorrelationEstimate`."""
    if isinstance(source, TwoQubitState):
        return CorrelationEstimate(qm_correlation(source, a, b), 0.0, 1, "exact")
    if isinstance(source, DensityMatrix):
        return CorrelationEstimate(qm_correlation_density(source, a, b), 0.0, 1, "exact")
    if isinstance(source, HiddenVariableModel):
        if cfg is None:
            raise ValueError(f"hidden-variable source {source.name!r} needs an IntegrationConfig")
        return lhv_correlation(source, a, b, cfg)
    raise TypeError(f"unsupported correlation source {type(source).__name__}")


def evaluate_all(
    source,
    a: Direction,
    b: Direction,
    c: Direction,
    cfg: IntegrationConfig | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    name: str | None = None,
):
    """Run ``bell_original``, ``generalized_bell`` and ``bound_check`` on one triple.

    Returns ``(reports, bound, estimates)``. For Monte Carlo sources the
    verdict tolerance widens to ``confidence_sigma`` times the three
    standard errors added in quadrature.
    """
    label = name or source_name(source)
    est = tuple(correlation(source, u, v, cfg) for u, v in ((a, b), (a, c), (b, c)))
    tol = tolerance
    if any(e.std_error > 0 for e in est):
        combined = math.sqrt(sum(e.std_error ** 2 for e in est))
        tol = max(tolerance, cfg.confidence_sigma * combined)
    p_ab, p_ac, p_bc = (e.mean for e in est)
    reports = [
        bell_original(p_ab, p_ac, p_bc, tol, label),
        generalized_bell(p_ab, p_ac, p_bc, tol, label),
    ]
    return reports, bound_check([p_ab, p_ac, p_bc], tol), est
