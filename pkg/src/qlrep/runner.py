"""Pipelines behind the command line: run a scenario, emit CSV and report.

One scenario maps to one pipeline; outputs are written atomically (temp file
in the target directory, then rename). CSV bytes depend only on the scenario
content plus the effective seed and h; the report isolates its timestamp in
the meta header so everything below it is reproducible.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ._version import __version__
from .dynamics import (
    _subsample,
    approximation_analysis,
    classify_dynamics,
    cocycle_residual,
    energy_process,
    group_law_residual,
    phase_trajectory,
    propagator,
    validate_preconditions,
)
from .errors import (
    DegenerateCellError,
    DegenerateContextError,
    IncompatibilityError,
    NotRepresentableError,
    ScenarioError,
)
from .hilbert import represent, theorem_check
from .interference import DEGENERATE_BOUNDARY, classify_context
from .lambda_ode import (
    LambdaTrajectory,
    schroedinger_detector,
    harmonic_residual,
    solve_eabb,
    solve_theta,
)
from .prespace import build_conserving_process, conditional_probability, contextual_data
from .scenario import Scenario

__all__ = ["run_scenario", "emit_report", "write_csv"]

DYNAMICS_HEADER = "t,theta,lambda,xi,pB1,pB2,pA1,pA2"
ODE_HEADER = "t,theta,lambda,method"


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _jsonable(obj):
    """Recursively coerce numpy scalars so json.dumps never chokes."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def write_csv(path: str | Path, header: str, rows: list[list]) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def emit_report(report: dict, path: str | Path) -> None:
    _atomic_write(Path(path), json.dumps(report, indent=2) + "\n")


def _data_echo(data) -> dict:
    return {
        "p_a": list(data.p_a),
        "p_b": list(data.p_b),
        "transition": [list(r) for r in data.transition],
    }


def _complex_pair(values) -> dict:
    return {"re": [v.real for v in values], "im": [v.imag for v in values]}


def _data_sources(scenario: Scenario) -> list[tuple[str, object]]:
    if scenario.data is not None:
        return [("direct", scenario.data)]
    spec = scenario.prespace
    return [
        (c.label, contextual_data(spec.space, spec.a, spec.b, c))
        for c in spec.contexts
    ]


def _represent_entry(label: str, data, profile: str) -> dict:
    rep = classify_context(data)
    if profile == "strict" and rep.classification == DEGENERATE_BOUNDARY:
        raise NotRepresentableError(
            "not representable under the strict profile: lambda sits on the boundary"
        )
    state = represent(data, rep)
    check = theorem_check(data, rep)
    residuals = [
        abs(abs(state.amplitude.components[x]) ** 2 - data.p_b[x]) for x in (0, 1)
    ]
    return {
        "label": label,
        "contextual_data": _data_echo(data),
        "classification": rep.classification,
        "lambda": list(rep.lam),
        "phases": list(state.phases),
        "amplitude": _complex_pair(state.amplitude.components),
        "born_residuals": residuals,
        "a_basis": [_complex_pair(vec) for vec in state.basis.a_basis],
        "a_global_phase": state.basis.a_global_phase,
        "orthonormal": state.basis.orthonormal,
        "boundary": state.boundary,
        "phase_disagreement": state.phase_disagreement,
        "double_stochastic": check.double_stochastic,
        "both_born_rules_hold": check.both_born_rules_hold,
    }


def _run_represent(scenario: Scenario, profile: str) -> tuple[dict, None]:
    entries = [
        _represent_entry(label, data, profile)
        for label, data in _data_sources(scenario)
    ]
    return {"contexts": entries}, None


def _run_classify(scenario: Scenario) -> tuple[dict, None]:
    entries = []
    for label, data in _data_sources(scenario):
        rep = classify_context(data)
        entries.append(
            {
                "label": label,
                "classification": rep.classification,
                "lambda": list(rep.lam),
                "phases": None if rep.phases is None else list(rep.phases),
                "representable": rep.representable,
            }
        )
    return {"contexts": entries}, None


def _witness_json(witness) -> dict | None:
    if witness is None:
        return None
    return {
        "phi1": _complex_pair(witness.phi1),
        "phi2": _complex_pair(witness.phi2),
        "alpha": {"re": witness.alpha.real, "im": witness.alpha.imag},
        "beta": {"re": witness.beta.real, "im": witness.beta.imag},
        "interval": list(witness.interval),
        "context_labels": list(witness.context_labels),
        "violation": witness.violation,
    }


def _classification_json(cls) -> dict:
    return {
        "trig_preserved": cls.trig_preserved,
        "a_prob_conserved": cls.a_prob_conserved,
        "transition_conserved": cls.transition_conserved,
        "linear": cls.linear,
        "deterministic": cls.deterministic,
        "continuous": cls.continuous,
        "time_shift_invariant": cls.time_shift_invariant,
        "schroedinger": cls.schroedinger,
    }


def _harmonic_json(fit, h: float) -> dict:
    return {
        "is_harmonic": fit.is_harmonic,
        "fitted_omega": fit.fitted_omega,
        "residual": fit.residual,
        "degenerate": fit.degenerate,
        "energy": fit.energy(h),
    }


def _run_evolve(scenario: Scenario, profile: str, h: float) -> tuple[dict, list[list]]:
    label, data = _data_sources(scenario)[0]
    rep = classify_context(data)
    if profile == "strict" and rep.classification == DEGENERATE_BOUNDARY:
        raise NotRepresentableError(
            "not representable under the strict profile: lambda sits on the boundary"
        )
    state = represent(data, rep)
    law = scenario.law
    labels = list(law.context_increments) if law.context_increments else []
    probe = labels[0] if labels else None
    pts = scenario.grid.points()

    rows = []
    lam_path = []
    theta_path = []
    for t, xi, st in phase_trajectory(state, law, pts, context=probe):
        theta = st.phases[0]
        lam = math.cos(theta)
        rows.append(
            [t, theta, lam, xi, st.source_data.p_b[0], st.source_data.p_b[1],
             st.source_data.p_a[0], st.source_data.p_a[1]]
        )
        theta_path.append(theta)
        lam_path.append(lam)

    cls = classify_dynamics(law, pts, contexts=labels, h=h, context=probe)

    sub = _subsample(pts)
    unitarity = 0.0
    for lab in labels or [None]:
        for t in sub[1:]:
            u = propagator(law, sub[0], t, lab).as_array()
            unitarity = max(
                unitarity,
                float(abs(abs(u[1, 1]) ** 2 - 1.0)),
            )

    harmonic = None
    residual_at_extracted = None
    if len(pts) >= 16:
        traj = LambdaTrajectory(
            grid=pts, lam=tuple(lam_path), theta=tuple(theta_path),
            method="theta-integration",
        )
        harmonic = _harmonic_json(schroedinger_detector(traj), h)
        if cls.extracted_energy is not None:
            residual_at_extracted = harmonic_residual(
                traj, abs(cls.extracted_energy) / h
            )

    energy_samples = None
    if cls.time_dependent_generator is not None:
        energy_samples = [[t, cls.time_dependent_generator(t)] for t in sub]

    approximation = None
    if law.perturbation is not None:
        rep_approx = approximation_analysis(
            law, h, horizon=pts[-1] - pts[0], t0=pts[0]
        )
        approximation = {
            "reversible_approx": rep_approx.reversible_approx,
            "linear_approx": rep_approx.linear_approx,
            "epsilon_hat": rep_approx.epsilon_hat,
            "bound": rep_approx.bound,
            "observed_deviation": rep_approx.observed_deviation,
            "horizon": rep_approx.horizon,
        }

    check = theorem_check(data, rep)
    born_residuals = [
        abs(abs(state.amplitude.components[x]) ** 2 - data.p_b[x]) for x in (0, 1)
    ]
    results = {
        "source": label,
        "contextual_data": _data_echo(data),
        "context_classification": rep.classification,
        "lambda": list(rep.lam),
        "phases": list(state.phases),
        "double_stochastic": check.double_stochastic,
        "both_born_rules_hold": check.both_born_rules_hold,
        "born_residuals": born_residuals,
        "classification": _classification_json(cls),
        "extracted_energy": cls.extracted_energy,
        "energy_samples": energy_samples,
        "cocycle_residual": cocycle_residual(law, pts, probe),
        "group_law_residual": group_law_residual(law, pts, probe),
        "unitarity_residual": unitarity,
        "harmonic": harmonic,
        "harmonic_residual_at_extracted_omega": residual_at_extracted,
        "witness": _witness_json(cls.witness),
        "approximation": approximation,
        "rows": len(rows),
    }
    return results, rows


def _run_prespace(scenario: Scenario, seed: int) -> tuple[dict, None]:
    spec = scenario.prespace
    process = build_conserving_process(
        spec.space, spec.a, spec.contexts, spec.steps, seed, b0=spec.b
    )
    pre = validate_preconditions(process, spec.contexts)
    classifications = {}
    for c in spec.contexts:
        try:
            classifications[c.label] = classify_context(
                contextual_data(spec.space, spec.a, spec.b, c)
            ).classification
        except (DegenerateContextError, IncompatibilityError, DegenerateCellError):
            classifications[c.label] = "unclassifiable"
    baseline = {
        (c.label, y): conditional_probability(
            spec.space, process.a_variables[0].level_set(y), c
        )
        for c in spec.contexts
        for y in (0, 1)
    }
    per_step = []
    overall = 0.0
    for i, t in enumerate(process.time_grid):
        dev = 0.0
        for c in spec.contexts:
            for y in (0, 1):
                p = conditional_probability(
                    spec.space, process.a_variables[i].level_set(y), c
                )
                dev = max(dev, abs(p - baseline[(c.label, y)]))
        overall = max(overall, dev)
        per_step.append({"t": t, "max_deviation": dev})
    energy_rep = energy_process(process, spec.energy, spec.contexts)
    changed: set[str] = set()
    for i in range(1, len(process.time_grid)):
        changed |= process.changed_atoms(0, i)
    results = {
        "atoms": len(spec.space.points),
        "steps": spec.steps,
        "tracked_contexts": [c.label for c in spec.contexts],
        "context_classifications": classifications,
        "trig_preserved": pre.trig_preserved,
        "a_prob_conserved": pre.a_prob_conserved,
        "transition_conserved": pre.transition_conserved,
        "conservation": {
            "per_step": per_step,
            "max_deviation": overall,
            "conserved": overall <= 1e-12,
        },
        "energy": {
            "levels": list(energy_rep.energy_process.levels),
            "statistically_conserved": energy_rep.statistically_conserved,
            "max_distribution_deviation": energy_rep.max_distribution_deviation,
            "nonconstant_trajectories": energy_rep.nonconstant_trajectories,
        },
        "changed_atoms_total": len(changed),
    }
    return results, None


def _run_ode(scenario: Scenario, h: float) -> tuple[dict, list[list]]:
    law = scenario.law
    if law.integrand is None:
        raise ScenarioError("law: ode kind needs a plain f(t) family")
    f = law.integrand
    ode = scenario.ode
    pts = scenario.grid.points()
    dt = scenario.grid.dt

    rows: list[list] = []
    trajectories = {}
    if ode.method in ("both", "theta"):
        tr = solve_theta(f, ode.theta0, pts[0], pts, dt=dt)
        trajectories["theta-integration"] = tr
    if ode.method in ("both", "eabb"):
        tr = solve_eabb(f, ode.lambda0, ode.sign_init, pts[0], pts, dt=dt)
        trajectories["direct-EABB"] = tr
    for name, tr in trajectories.items():
        for t, th, lv in zip(tr.grid, tr.theta, tr.lam):
            rows.append([t, th, lv, name])

    sup = None
    if len(trajectories) == 2:
        a = trajectories["theta-integration"].lam
        b = trajectories["direct-EABB"].lam
        sup = max(abs(x - y) for x, y in zip(a, b))

    primary = trajectories.get(
        "theta-integration", trajectories.get("direct-EABB")
    )
    harmonic = None
    if len(pts) >= 16:
        harmonic = _harmonic_json(schroedinger_detector(primary), h)

    results = {
        "methods": list(trajectories),
        "sup_disagreement": sup,
        "harmonic": harmonic,
        "final": {
            "t": primary.grid[-1],
            "theta": primary.theta[-1],
            "lambda": primary.lam[-1],
        },
        "rows": len(rows),
    }
    return results, rows


def run_scenario(
    scenario: Scenario,
    *,
    out_dir: str | Path | None = None,
    seed: int | None = None,
    h: float | None = None,
    tolerance_profile: str = "default",
    scenario_name: str = "",
) -> dict:
    """Execute one scenario and write its outputs; returns the report dict."""
    if tolerance_profile not in ("default", "strict"):
        raise ScenarioError(
            f"tolerance-profile: expected default or strict, got {tolerance_profile!r}"
        )
    seed_eff = scenario.seed if seed is None else int(seed)
    h_eff = scenario.h if h is None else float(h)
    base = Path(out_dir) if out_dir is not None else Path.cwd()

    csv_rows = None
    csv_header = DYNAMICS_HEADER
    if scenario.kind == "represent":
        results, csv_rows = _run_represent(scenario, tolerance_profile)
    elif scenario.kind == "classify":
        results, csv_rows = _run_classify(scenario)
    elif scenario.kind == "evolve":
        results, csv_rows = _run_evolve(scenario, tolerance_profile, h_eff)
    elif scenario.kind == "prespace":
        results, csv_rows = _run_prespace(scenario, seed_eff)
    else:
        results, csv_rows = _run_ode(scenario, h_eff)
        csv_header = ODE_HEADER

    report = {
        "meta": {
            "tool": "qlrep",
            "version": __version__,
            "kind": scenario.kind,
            "scenario": scenario_name,
            "seed": seed_eff,
            "h": h_eff,
            "tolerance_profile": tolerance_profile,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
        "results": _jsonable(results),
    }

    if scenario.csv_path is not None:
        if csv_rows is None:
            raise ScenarioError(
                f"outputs.csv: kind {scenario.kind!r} produces no time series"
            )
        target = Path(scenario.csv_path)
        write_csv(target if target.is_absolute() else base / target, csv_header, csv_rows)
    if scenario.report_path is not None:
        target = Path(scenario.report_path)
        emit_report(report, target if target.is_absolute() else base / target)
    return report
