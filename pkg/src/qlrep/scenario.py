"""Scenario files: schema, validation, and construction of runnable inputs.

A scenario is one TOML document describing a single pipeline run. Top-level
keys: kind, seed, h, contextual_data, prespace, law, grid, ode, outputs.
Validation failures raise ScenarioError with the offending field named, so
the command line can map them to its validation exit code.

Rate families are a closed set with exact antiderivatives:

    constant: f(t) = c                     (E shortcut: c = -E/h)
    linear:   f(t) = k t                   (E shortcut: k = -E/h)
    sinusoid: f(t) = A sin(Omega t + phi)

and the optional perturbation adds epsilon * (const + amp * sin(om * t0 + ph))
to the rate, a start-time dependence that breaks reversibility.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .dynamics import PhaseLaw, constant_rate_law, context_law, rate_law
from .errors import InputValidationError, ScenarioError
from .interference import ContextualData
from .prespace import Context, DichotomousVariable, ProbabilitySpace

__all__ = [
    "GridSpec",
    "OdeSpec",
    "PrespaceSpec",
    "Scenario",
    "load_scenario",
]

KINDS = ("represent", "classify", "evolve", "prespace", "ode")
MAX_GRID_POINTS = 10**7

_TOP_KEYS = {
    "kind",
    "seed",
    "h",
    "contextual_data",
    "prespace",
    "law",
    "grid",
    "ode",
    "outputs",
}


@dataclass(frozen=True)
class GridSpec:
    t0: float
    t1: float
    dt: float

    def __post_init__(self) -> None:
        if not (self.t1 > self.t0):
            raise ScenarioError("grid.t1: must be greater than grid.t0")
        if not (self.dt > 0):
            raise ScenarioError("grid.dt: must be positive")
        if (self.t1 - self.t0) / self.dt > MAX_GRID_POINTS:
            raise ScenarioError("grid.dt: more than 1e7 steps requested")

    def points(self) -> tuple[float, ...]:
        n = int(math.floor((self.t1 - self.t0) / self.dt + 1e-9))
        return tuple(self.t0 + i * self.dt for i in range(n + 1))


@dataclass(frozen=True)
class OdeSpec:
    theta0: float
    lambda0: float
    sign_init: int
    method: str


@dataclass(frozen=True)
class PrespaceSpec:
    space: ProbabilitySpace
    a: DichotomousVariable
    b: DichotomousVariable | None
    contexts: tuple[Context, ...]
    steps: int
    energy: float


@dataclass(frozen=True)
class Scenario:
    kind: str
    seed: int
    h: float
    data: ContextualData | None
    prespace: PrespaceSpec | None
    law: PhaseLaw | None
    law_info: dict | None
    grid: GridSpec | None
    ode: OdeSpec | None
    csv_path: str | None
    report_path: str | None


def _require_table(doc: Mapping, key: str) -> Mapping:
    val = doc.get(key)
    if not isinstance(val, Mapping):
        raise ScenarioError(f"{key}: required section missing or not a table")
    return val


def _number(table: Mapping, key: str, field: str, default=None) -> float:
    if key not in table:
        if default is None:
            raise ScenarioError(f"{field}: required number missing")
        return float(default)
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ScenarioError(f"{field}: expected a number, got {v!r}")
    return float(v)


def _integer(table: Mapping, key: str, field: str, default=None) -> int:
    if key not in table:
        if default is None:
            raise ScenarioError(f"{field}: required integer missing")
        return int(default)
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ScenarioError(f"{field}: expected an integer, got {v!r}")
    return v


def _pair(table: Mapping, key: str, field: str) -> tuple[float, float]:
    v = table.get(key)
    if not isinstance(v, list) or len(v) != 2:
        raise ScenarioError(f"{field}: expected a list of 2 numbers")
    return (float(v[0]), float(v[1]))


def _contextual_data(table: Mapping) -> ContextualData:
    p_a = _pair(table, "p_a", "contextual_data.p_a")
    p_b = _pair(table, "p_b", "contextual_data.p_b")
    tr = table.get("transition")
    if not isinstance(tr, list) or len(tr) != 2 or any(
        not isinstance(r, list) or len(r) != 2 for r in tr
    ):
        raise ScenarioError("contextual_data.transition: expected a 2x2 matrix")
    try:
        return ContextualData(
            p_a=p_a,
            p_b=p_b,
            transition=tuple(tuple(float(x) for x in r) for r in tr),
        )
    except InputValidationError as exc:
        raise ScenarioError(f"contextual_data: {exc}") from exc


def _variable(
    name: str, raw, values, atoms: tuple[str, ...], field: str
) -> DichotomousVariable:
    if not isinstance(raw, list) or len(raw) != len(atoms):
        raise ScenarioError(f"{field}: expected one value index per atom")
    for v in raw:
        if v not in (0, 1):
            raise ScenarioError(f"{field}: value indices must be 0 or 1")
    try:
        return DichotomousVariable(
            name=name, values=values, assignment=dict(zip(atoms, raw))
        )
    except InputValidationError as exc:
        raise ScenarioError(f"{field}: {exc}") from exc


def _prespace(table: Mapping) -> PrespaceSpec:
    atoms = table.get("atoms")
    if not isinstance(atoms, list) or not all(isinstance(a, str) for a in atoms):
        raise ScenarioError("prespace.atoms: expected a list of strings")
    atoms = tuple(atoms)
    weights = table.get("weights")
    if not isinstance(weights, list) or len(weights) != len(atoms):
        raise ScenarioError("prespace.weights: expected one weight per atom")
    try:
        space = ProbabilitySpace(points=atoms, weights=tuple(float(w) for w in weights))
    except InputValidationError as exc:
        raise ScenarioError(f"prespace.weights: {exc}") from exc

    a_values = _pair(table, "a_values", "prespace.a_values") if "a_values" in table else (0.0, 1.0)
    b_values = _pair(table, "b_values", "prespace.b_values") if "b_values" in table else (0.0, 1.0)
    if "a" not in table:
        raise ScenarioError("prespace.a: required assignment missing")
    a_var = _variable("a", table["a"], a_values, atoms, "prespace.a")
    b_var = None
    if "b" in table:
        b_var = _variable("b", table["b"], b_values, atoms, "prespace.b")

    raw_contexts = table.get("contexts")
    if not isinstance(raw_contexts, list) or not raw_contexts:
        raise ScenarioError("prespace.contexts: at least one context required")
    contexts = []
    for i, entry in enumerate(raw_contexts):
        field = f"prespace.contexts[{i}]"
        if not isinstance(entry, Mapping):
            raise ScenarioError(f"{field}: expected a table")
        label = entry.get("label")
        if not isinstance(label, str) or not label:
            raise ScenarioError(f"{field}.label: expected a nonempty string")
        members = entry.get("atoms")
        if not isinstance(members, list) or not members:
            raise ScenarioError(f"{field}.atoms: expected a nonempty list")
        for m in members:
            if m not in atoms:
                raise ScenarioError(f"{field}.atoms: unknown atom {m!r}")
        contexts.append(Context(label=label, atoms=frozenset(members)))
    if len({c.label for c in contexts}) != len(contexts):
        raise ScenarioError("prespace.contexts: labels must be unique")

    steps = _integer(table, "steps", "prespace.steps", default=0)
    if steps < 0:
        raise ScenarioError("prespace.steps: must be nonnegative")
    energy = _number(table, "energy", "prespace.energy", default=1.0)
    return PrespaceSpec(
        space=space,
        a=a_var,
        b=b_var,
        contexts=tuple(contexts),
        steps=steps,
        energy=energy,
    )


def _family_rate(table: Mapping, h: float, field: str) -> PhaseLaw:
    family = table.get("family")
    if family == "constant":
        if "c" in table and "E" in table:
            raise ScenarioError(f"{field}: give either c or E, not both")
        if "E" in table:
            c = -_number(table, "E", f"{field}.E") / h
        else:
            c = _number(table, "c", f"{field}.c")
        return constant_rate_law(c)
    if family == "linear":
        if "k" in table and "E" in table:
            raise ScenarioError(f"{field}: give either k or E, not both")
        if "E" in table:
            k = -_number(table, "E", f"{field}.E") / h
        else:
            k = _number(table, "k", f"{field}.k")
        return rate_law(lambda t: k * t, antiderivative=lambda t: 0.5 * k * t * t)
    if family == "sinusoid":
        amp = _number(table, "A", f"{field}.A")
        omega = _number(table, "Omega", f"{field}.Omega")
        phi = _number(table, "phase", f"{field}.phase", default=0.0)
        if omega == 0.0:
            raise ScenarioError(f"{field}.Omega: must be nonzero (use family constant)")
        return rate_law(
            lambda t: amp * math.sin(omega * t + phi),
            antiderivative=lambda t: -amp / omega * math.cos(omega * t + phi),
        )
    raise ScenarioError(f"{field}.family: unknown value {family!r}")


def _law(table: Mapping, h: float) -> PhaseLaw:
    sub = table.get("contexts")
    if sub is not None:
        if not isinstance(sub, list) or len(sub) < 2:
            raise ScenarioError("law.contexts: expected at least 2 entries")
        per = {}
        for i, entry in enumerate(sub):
            field = f"law.contexts[{i}]"
            if not isinstance(entry, Mapping):
                raise ScenarioError(f"{field}: expected a table")
            label = entry.get("label")
            if not isinstance(label, str) or not label:
                raise ScenarioError(f"{field}.label: expected a nonempty string")
            per[label] = _family_rate(entry, h, field)
        if len(per) != len(sub):
            raise ScenarioError("law.contexts: labels must be unique")
        return context_law(per)

    base = _family_rate(table, h, "law")
    pert = table.get("perturbation")
    if pert is None:
        return base
    if not isinstance(pert, Mapping):
        raise ScenarioError("law.perturbation: expected a table")
    eps = _number(pert, "epsilon", "law.perturbation.epsilon")
    const = _number(pert, "constant", "law.perturbation.constant", default=0.0)
    amp = _number(pert, "amplitude", "law.perturbation.amplitude", default=0.0)
    om = _number(pert, "omega", "law.perturbation.omega", default=0.0)
    ph = _number(pert, "phase", "law.perturbation.phase", default=0.0)

    def f1(t: float, t0: float) -> float:
        return const + amp * math.sin(om * t0 + ph)

    def inc(t: float, t0: float) -> float:
        return base.increment(t, t0) + eps * f1(t, t0) * (t - t0)

    return PhaseLaw(
        kind="function-of-(t,t0)",
        increment=inc,
        perturbation=(eps, f1),
        base_law=base,
    )


def _grid(table: Mapping) -> GridSpec:
    return GridSpec(
        t0=_number(table, "t0", "grid.t0"),
        t1=_number(table, "t1", "grid.t1"),
        dt=_number(table, "dt", "grid.dt"),
    )


def _ode(table: Mapping | None) -> OdeSpec:
    table = table or {}
    theta0 = _number(table, "theta0", "ode.theta0", default=0.0)
    lam_default = math.cos(theta0)
    lambda0 = _number(table, "lambda0", "ode.lambda0", default=lam_default)
    sign_default = -1 if math.sin(theta0) > 0 else 1
    sign_init = _integer(table, "sign_init", "ode.sign_init", default=sign_default)
    if sign_init not in (1, -1):
        raise ScenarioError("ode.sign_init: must be 1 or -1")
    method = table.get("method", "both")
    if method not in ("both", "theta", "eabb"):
        raise ScenarioError(f"ode.method: unknown value {method!r}")
    return OdeSpec(theta0=theta0, lambda0=lambda0, sign_init=sign_init, method=method)


def load_scenario(path: str | Path, h_override: float | None = None) -> Scenario:
    """Parse and validate one scenario file.

    h_override replaces the file's h before laws are built, so energy
    shortcuts (c = -E/h) see the effective value.
    """
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise ScenarioError(f"scenario file {str(p)!r} is not readable: {exc}") from exc
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ScenarioError(f"scenario file {str(p)!r} is not valid TOML: {exc}") from exc

    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ScenarioError(f"{sorted(unknown)[0]}: unknown top-level key")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"kind: expected one of {KINDS}, got {kind!r}")
    seed = _integer(doc, "seed", "seed", default=0)
    h = _number(doc, "h", "h", default=1.0)
    if h_override is not None:
        h = float(h_override)
    if h <= 0:
        raise ScenarioError("h: must be positive")

    data = None
    prespace = None
    if kind in ("represent", "classify", "evolve"):
        has_data = "contextual_data" in doc
        has_pre = "prespace" in doc
        if has_data == has_pre:
            raise ScenarioError(
                f"{kind}: exactly one of contextual_data / prespace must be present"
            )
        if has_data:
            data = _contextual_data(_require_table(doc, "contextual_data"))
        else:
            prespace = _prespace(_require_table(doc, "prespace"))
            if prespace.b is None:
                raise ScenarioError("prespace.b: required for this kind")
    elif kind == "prespace":
        prespace = _prespace(_require_table(doc, "prespace"))

    law = None
    law_info = None
    if kind in ("evolve", "ode"):
        law_table = _require_table(doc, "law")
        law = _law(law_table, h)
        law_info = _plain(law_table)

    grid = None
    if kind in ("evolve", "ode"):
        grid = _grid(_require_table(doc, "grid"))

    ode = _ode(doc.get("ode")) if kind == "ode" else None

    outputs = doc.get("outputs", {})
    if not isinstance(outputs, Mapping):
        raise ScenarioError("outputs: expected a table")
    csv_path = outputs.get("csv")
    report_path = outputs.get("report")
    for label, value in (("outputs.csv", csv_path), ("outputs.report", report_path)):
        if value is not None and (not isinstance(value, str) or not value):
            raise ScenarioError(f"{label}: expected a nonempty string")

    return Scenario(
        kind=kind,
        seed=seed,
        h=h,
        data=data,
        prespace=prespace,
        law=law,
        law_info=law_info,
        grid=grid,
        ode=ode,
        csv_path=csv_path,
        report_path=report_path,
    )


def _plain(value):
    """TOML values to JSON-serializable builtins, preserving table order."""
    if isinstance(value, Mapping):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value
