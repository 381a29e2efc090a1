"""Scenario files, batch evaluation and tabular export.

A scenario is a YAML document::

    # singlet against the 60/60 coplanar triple
    source:
      state: singlet            # or amplitudes / density / model
    directions:                 # degrees in the xz-plane, or [x, y, z]
      a: 0
      b: 60
      c: 120
    triples: [[a, b, c]]        # optional; default is every ordered
                                # combination of the named directions
    integration:                # only used by hidden-variable models
      method: monte-carlo       # or sphere-quadrature
      samples: 100000
      seed: 1
      confidence_sigma: 3
    inequalities: [bell_original, generalized_bell, bound]
    output:
      path: results.csv         # relative paths resolve against $BELLEXP_OUTPUT_DIR
      format: csv               # or text

Source forms: ``state: <name>``, ``amplitudes: [a0, a1, a2, a3]`` (each entry a
number or ``[re, im]``), ``density: <state name> | maximally-mixed | 4x4
entries``, ``model: <hidden-variable model name>``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
import csv
import io
from itertools import combinations
import math
import os
from pathlib import Path

import numpy as np
import yaml

from .inequalities import bell_original, bound_check, correlation, generalized_bell
from .lhv import MODEL_ZOO, IntegrationConfig, get_model
from .spin import DOWN, UP, DensityMatrix, Direction, TwoQubitState, density_from_pure, product_state, singlet

OUTPUT_DIR_ENV = "BELLEXP_OUTPUT_DIR"
INEQUALITIES = ("bell_original", "generalized_bell", "bound")
FORMATS = ("csv", "text")

_R = 1 / math.sqrt(2)
STATES = {
    "singlet": singlet,
    "up-down": lambda: product_state(UP, DOWN),
    "up-up": lambda: product_state(UP, UP),
    "down-up": lambda: product_state(DOWN, UP),
    "down-down": lambda: product_state(DOWN, DOWN),
    "triplet-zero": lambda: TwoQubitState(np.array([0, _R, _R, 0], dtype=complex)),
    "phi-plus": lambda: TwoQubitState(np.array([_R, 0, 0, _R], dtype=complex)),
    "phi-minus": lambda: TwoQubitState(np.array([_R, 0, 0, -_R], dtype=complex)),
}


class ScenarioError(ValueError):
    """Invalid scenario content; the message names the key and line."""


def fmt(x) -> str:
    """Locale-free number formatting used for every exported value."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float) or isinstance(x, np.floating):
        return format(float(x), ".17g")
    return str(x)


def get_state(name: str) -> TwoQubitState:
    try:
        return STATES[name]()
    except KeyError:
        raise KeyError(f"unknown state {name!r}; available: {', '.join(sorted(STATES))}") from None


@dataclass(frozen=True)
class Scenario:
    source: dict
    directions: dict
    triples: tuple[tuple[str, str, str], ...] | None = None
    integration: IntegrationConfig = field(default_factory=IntegrationConfig)
    inequalities: tuple[str, ...] = INEQUALITIES
    output_path: str = "results.csv"
    output_format: str = "csv"

    def direction(self, name: str) -> Direction:
        value = self.directions[name]
        if isinstance(value, (list, tuple)):
            return Direction.from_vector(value)
        return Direction.from_angle(float(value))

    def resolved_triples(self):
        if self.triples is not None:
            return list(self.triples)
        return list(combinations(self.directions, 3))

    def build_source(self):
        kind, value = next(iter(self.source.items()))
        if kind == "state":
            return get_state(value), value
        if kind == "amplitudes":
            return TwoQubitState(np.array([_complex(v) for v in value])), "amplitudes"
        if kind == "density":
            if isinstance(value, str):
                if value == "maximally-mixed":
                    return DensityMatrix.maximally_mixed(), "density:maximally-mixed"
                return density_from_pure(get_state(value)), f"density:{value}"
            return DensityMatrix(np.array([[_complex(v) for v in row] for row in value])), "density"
        if kind == "model":
            return get_model(value), f"lhv:{value}"
        raise ScenarioError(f"unknown source kind {kind!r}")

    def to_dict(self) -> dict:
        cfg = self.integration
        out = {
            "source": dict(self.source),
            "directions": {k: (list(v) if isinstance(v, (list, tuple)) else v) for k, v in self.directions.items()},
            "integration": {
                "method": cfg.method,
                "samples": cfg.sample_count,
                "seed": cfg.seed,
                "confidence_sigma": cfg.confidence_sigma,
                "workers": cfg.workers,
            },
            "inequalities": list(self.inequalities),
            "output": {"path": self.output_path, "format": self.output_format},
        }
        if self.triples is not None:
            out["triples"] = [list(t) for t in self.triples]
        return out

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _complex(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ScenarioError(f"complex entry {v!r} must be [re, im]")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def _key_lines(node, prefix="", out=None):
    """Map dotted key paths to 1-based line numbers of a composed YAML tree."""
    if out is None:
        out = {}
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = f"{prefix}.{k.value}" if prefix else str(k.value)
            out[path] = k.start_mark.line + 1
            _key_lines(v, path, out)
    elif isinstance(node, yaml.SequenceNode):
        for i, v in enumerate(node.value):
            path = f"{prefix}[{i}]"
            out[path] = v.start_mark.line + 1
            _key_lines(v, path, out)
    return out


def parse_scenario(text: str) -> Scenario:
    try:
        node = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ScenarioError(f"scenario is not valid YAML{where}: {exc}") from None
    lines = _key_lines(node) if node is not None else {}

    def fail(key, msg):
        line = lines.get(key)
        where = f" (line {line})" if line else ""
        raise ScenarioError(f"{key}{where}: {msg}")

    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping of sections")
    known = {"source", "directions", "triples", "integration", "inequalities", "output"}
    for key in data:
        if key not in known:
            fail(key, f"unknown section; expected one of {', '.join(sorted(known))}")

    source = data.get("source")
    if not isinstance(source, dict) or len(source) != 1:
        fail("source", "needs exactly one of state, amplitudes, density, model")
    kind, value = next(iter(source.items()))
    if kind == "state" and value not in STATES:
        fail(f"source.{kind}", f"unknown state {value!r}; available: {', '.join(sorted(STATES))}")
    elif kind == "model" and value not in MODEL_ZOO:
        fail(f"source.{kind}", f"unknown model {value!r}; available: {', '.join(sorted(MODEL_ZOO))}")
    elif kind == "density" and isinstance(value, str) and value != "maximally-mixed" and value not in STATES:
        fail(
            f"source.{kind}",
            f"unknown density {value!r}; available: maximally-mixed, {', '.join(sorted(STATES))}",
        )
    elif kind not in ("state", "amplitudes", "density", "model"):
        fail(f"source.{kind}", "unknown source kind; expected state, amplitudes, density or model")

    directions = data.get("directions") or {}
    if not isinstance(directions, dict):
        fail("directions", "must map names to angles in degrees or [x, y, z] vectors")
    dirs = {}
    for name, entry in directions.items():
        key = f"directions.{name}"
        try:
            if isinstance(entry, list):
                Direction.from_vector(entry)
                dirs[str(name)] = tuple(float(c) for c in entry)
            elif isinstance(entry, (int, float)) and not isinstance(entry, bool):
                dirs[str(name)] = float(entry)
            else:
                raise ValueError(f"expected angle or [x, y, z], got {entry!r}")
        except (TypeError, ValueError) as exc:
            fail(key, str(exc))

    triples = data.get("triples")
    if triples is not None:
        if not isinstance(triples, list):
            fail("triples", "must be a list of [a, b, c] name lists")
        parsed = []
        for i, t in enumerate(triples):
            if not isinstance(t, list) or len(t) != 3:
                fail(f"triples[{i}]", "each triple lists exactly three direction names")
            for n in t:
                if str(n) not in dirs:
                    fail(f"triples[{i}]", f"unknown direction {n!r}; available: {', '.join(dirs) or 'none'}")
            parsed.append(tuple(str(n) for n in t))
        triples = tuple(parsed)

    integ = data.get("integration") or {}
    if not isinstance(integ, dict):
        fail("integration", "must be a mapping")
    allowed = {"method", "samples", "seed", "confidence_sigma", "workers"}
    for k in integ:
        if k not in allowed:
            fail(f"integration.{k}", f"unknown key; expected one of {', '.join(sorted(allowed))}")
    try:
        cfg = IntegrationConfig(
            method=integ.get("method", "monte-carlo"),
            sample_count=int(integ.get("samples", 100_000)),
            seed=int(integ.get("seed", 0)),
            confidence_sigma=float(integ.get("confidence_sigma", 3.0)),
            workers=int(integ.get("workers", 1)),
        )
    except (TypeError, ValueError) as exc:
        fail("integration", str(exc))

    ineqs = data.get("inequalities", list(INEQUALITIES))
    if not isinstance(ineqs, list) or not ineqs:
        fail("inequalities", f"must be a non-empty list from {', '.join(INEQUALITIES)}")
    for i, name in enumerate(ineqs):
        if name not in INEQUALITIES:
            fail(f"inequalities[{i}]", f"unknown inequality {name!r}; available: {', '.join(INEQUALITIES)}")

    output = data.get("output") or {}
    if not isinstance(output, dict):
        fail("output", "must be a mapping with path and format")
    fmt_name = output.get("format", "csv")
    if fmt_name not in FORMATS:
        fail("output.format", f"unknown format {fmt_name!r}; available: {', '.join(FORMATS)}")

    return Scenario(
        source={kind: value},
        directions=dirs,
        triples=triples,
        integration=cfg,
        inequalities=tuple(ineqs),
        output_path=str(output.get("path", "results.csv")),
        output_format=fmt_name,
    )


def load_scenario(path) -> Scenario:
    return parse_scenario(Path(path).read_text())


@dataclass
class ScenarioResult:
    rows: list[dict]
    correlations: list[dict]


INEQUALITY_FIELDS = ["a", "b", "c", "name", "lhs", "rhs", "margin", "satisfied", "tolerance", "source"]
CORRELATION_FIELDS = ["setting_1", "setting_2", "mean", "std_error", "samples", "method", "source"]


def evaluate_scenario(scenario: Scenario) -> ScenarioResult:
    """Evaluate every selected inequality on every direction triple.

    Raises :class:`ScenarioError` for configuration problems; anything the
    inequality engine raises propagates unchanged.
    """
    triples = scenario.resolved_triples()
    if not triples:
        raise ScenarioError("directions: no direction triples")
    try:
        source, label = scenario.build_source()
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"source: {exc}") from None
    cfg = scenario.integration

    cache = {}

    def corr(u, v):
        if (u, v) not in cache:
            cache[(u, v)] = correlation(source, scenario.direction(u), scenario.direction(v), cfg)
        return cache[(u, v)]

    rows = []
    for a, b, c in triples:
        est = (corr(a, b), corr(a, c), corr(b, c))
        tol = 1e-9
        if any(e.std_error > 0 for e in est):
            tol = max(tol, cfg.confidence_sigma * math.sqrt(sum(e.std_error ** 2 for e in est)))
        p = [e.mean for e in est]
        for name in scenario.inequalities:
            if name == "bound":
                bound = bound_check(p, tol)
                row = dict(
                    name="bound", lhs=bound.composite, rhs=bound.composite_bound,
                    margin=bound.composite_bound - bound.composite,
                    satisfied=bound.all_in_bounds and bool(bound.composite_ok),
                )
            else:
                fn = bell_original if name == "bell_original" else generalized_bell
                r = fn(*p, tolerance=tol, source=label)
                row = dict(name=r.name, lhs=r.lhs, rhs=r.rhs, margin=r.margin, satisfied=r.satisfied)
            rows.append(dict(a=a, b=b, c=c, tolerance=tol, source=label, **row))
    correlations = [
        dict(setting_1=u, setting_2=v, mean=e.mean, std_error=e.std_error,
             samples=e.sample_count, method=e.method, source=label)
        for (u, v), e in cache.items()
    ]
    return ScenarioResult(rows, correlations)


def render_csv(rows, fields) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([fmt(row[f]) for f in fields])
    return buf.getvalue()


def render_text(result: ScenarioResult) -> str:
    lines = ["correlations"]
    for c in result.correlations:
        err = f" +/- {fmt(c['std_error'])}" if c["std_error"] else ""
        lines.append(f"  E({c['setting_1']}, {c['setting_2']}) = {fmt(c['mean'])}{err}  [{c['method']}]")
    lines.append("inequalities")
    for r in result.rows:
        verdict = "satisfied" if r["satisfied"] else "VIOLATED"
        lines.append(
            f"  ({r['a']}, {r['b']}, {r['c']}) {r['name']}: lhs = {fmt(r['lhs'])}, "
            f"rhs = {fmt(r['rhs'])}, margin = {fmt(r['margin'])} -> {verdict}"
        )
    return "\n".join(lines) + "\n"


def resolve_output(path: str) -> Path:
    p = Path(path)
    if not p.is_absolute() and os.environ.get(OUTPUT_DIR_ENV):
        p = Path(os.environ[OUTPUT_DIR_ENV]) / p
    return p


def correlations_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}.correlations{path.suffix or '.csv'}")


def write_outputs(scenario: Scenario, result: ScenarioResult, path: str | None = None) -> list[Path]:
    """Write the inequality table and the correlations table; return both paths."""
    out = resolve_output(path or scenario.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    if scenario.output_format == "text":
        out.write_text(render_text(result))
        return [out]
    out.write_text(render_csv(result.rows, INEQUALITY_FIELDS))
    corr_out = correlations_path(out)
    corr_out.write_text(render_csv(result.correlations, CORRELATION_FIELDS))
    return [out, corr_out]


def with_overrides(scenario: Scenario, seed=None, samples=None, workers=None, output=None) -> Scenario:
    cfg = scenario.integration
    cfg = replace(
        cfg,
        seed=cfg.seed if seed is None else seed,
        sample_count=cfg.sample_count if samples is None else samples,
        workers=cfg.workers if workers is None else workers,
    )
    return replace(scenario, integration=cfg, output_path=output or scenario.output_path)
