"""Diagnostic report structure, JSON round-trip, and text rendering.

One envelope type serves every audit mode; inactive sections are explicit
nulls in JSON so the schema never changes shape.  JSON rendering is
deterministic (fixed key order, shortest-round-trip floats), and
``parse_report(render_report(r)) == r`` exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .finite_sample import MonteCarloEstimate
from .info_bounds import MIReport
from .linear_bounds import BoundKind, BoundReport

TOOL_NAME = "effectaudit"


@dataclass(frozen=True)
class DatasetAuditSection:
    n: int
    p: int
    outcome: str
    predictors: list[str]
    predictor_correlations: list[list[float]]
    outcome_correlations: list[float]
    spectrum: list[float]
    vdc: BoundReport
    eigen: BoundReport
    regression: BoundReport
    beta: list[float]
    lambda_min: float
    singular_values: list[float]
    sigma1_sq: float
    expected_sum_sq: float
    mc: MonteCarloEstimate


@dataclass(frozen=True)
class MassRequirement:
    """Cross-correlation mass a set of claims forces on the explanatory variables."""

    cross_mass: float
    avg_abs_cross: float | None  # cross_mass / (p (p-1)); None when p == 1
    vacuous: bool  # requirement is <= 0: compatible with uncorrelated variables
    feasible: bool  # average |cross-correlation| <= 1 is achievable


@dataclass(frozen=True)
class MultiOutcomeRequirement:
    eps: float
    threshold: float  # tau_min - sqrt(2 eps)
    cross_mass: float
    avg_abs_cross: float | None
    vacuous: bool
    degenerate: bool  # threshold < 0: the bound carries no information
    feasible: bool


@dataclass(frozen=True)
class ClaimsSection:
    p: int
    tau: list[float]
    tau_min: float
    eps: float | None
    cross_supplied: bool
    base_requirement: MassRequirement
    multi_outcome_requirement: MultiOutcomeRequirement | None
    cross_mass_actual: float | None
    vdc: BoundReport | None
    eigen: BoundReport | None
    multi_outcome: BoundReport | None
    feasible: bool


@dataclass(frozen=True)
class SphereSection:
    n: int
    p: int
    trials: int
    singular_values: list[float]
    sigma1_sq: float
    expected_sum_sq: float
    mc: MonteCarloEstimate
    ks_distance: float


@dataclass(frozen=True)
class AggregateSection:
    count: int
    multiplier: float
    activation_prob: float
    sd_log: float
    low_multiplier: float
    high_multiplier: float


@dataclass(frozen=True)
class LogisticSection:
    count: int
    per_effect_logit: float
    total_logit: float
    swing_low: float
    swing_high: float


@dataclass(frozen=True)
class MiSection:
    outcome_index: int
    units: str
    report: MIReport
    slack: float


@dataclass(frozen=True)
class TightnessSection:
    p: int
    tau: float
    implied_corr: float
    off_diagonal: float  # tau^2
    sum_sq_corr: float
    lambda_max: float
    gap: float  # lambda_max - sum_sq_corr


@dataclass(frozen=True)
class DiagnosticReport:
    """Envelope for every diagnostic mode; exactly one section is populated."""

    version: str
    mode: str
    seed: int | None
    dataset: DatasetAuditSection | None = None
    claims: ClaimsSection | None = None
    sphere: SphereSection | None = None
    aggregate: AggregateSection | None = None
    logistic: LogisticSection | None = None
    mi: MiSection | None = None
    tightness: TightnessSection | None = None


def _bound_to_dict(b: BoundReport | None) -> dict | None:
    if b is None:
        return None
    return {
        "kind": b.kind.value,
        "lhs": b.lhs,
        "rhs": b.rhs,
        "satisfied": b.satisfied,
        "slack": b.slack,
    }


def _bound_from_dict(d: dict | None) -> BoundReport | None:
    if d is None:
        return None
    return BoundReport(
        kind=BoundKind(d["kind"]),
        lhs=d["lhs"],
        rhs=d["rhs"],
        satisfied=d["satisfied"],
        slack=d["slack"],
    )


def _mc_to_dict(mc: MonteCarloEstimate) -> dict:
    return {"mean": mc.mean, "stderr": mc.stderr, "trials": mc.trials, "seed": mc.seed}


def _mc_from_dict(d: dict) -> MonteCarloEstimate:
    return MonteCarloEstimate(
        mean=d["mean"], stderr=d["stderr"], trials=d["trials"], seed=d["seed"]
    )


def report_to_dict(r: DiagnosticReport) -> dict:
    d = r.dataset
    c = r.claims
    s = r.sphere
    return {
        "tool": TOOL_NAME,
        "version": r.version,
        "mode": r.mode,
        "seed": r.seed,
        "dataset": None
        if d is None
        else {
            "n": d.n,
            "p": d.p,
            "outcome": d.outcome,
            "predictors": d.predictors,
            "predictor_correlations": d.predictor_correlations,
            "outcome_correlations": d.outcome_correlations,
            "spectrum": d.spectrum,
            "bounds": {
                "vdc": _bound_to_dict(d.vdc),
                "eigen": _bound_to_dict(d.eigen),
                "regression": _bound_to_dict(d.regression),
            },
            "beta": d.beta,
            "lambda_min": d.lambda_min,
            "singular_values": d.singular_values,
            "sigma1_sq": d.sigma1_sq,
            "expected_sum_sq": d.expected_sum_sq,
            "mc": _mc_to_dict(d.mc),
        },
        "claims": None
        if c is None
        else {
            "p": c.p,
            "tau": c.tau,
            "tau_min": c.tau_min,
            "eps": c.eps,
            "cross_supplied": c.cross_supplied,
            "base_requirement": {
                "cross_mass": c.base_requirement.cross_mass,
                "avg_abs_cross": c.base_requirement.avg_abs_cross,
                "vacuous": c.base_requirement.vacuous,
                "feasible": c.base_requirement.feasible,
            },
            "multi_outcome_requirement": None
            if c.multi_outcome_requirement is None
            else {
                "eps": c.multi_outcome_requirement.eps,
                "threshold": c.multi_outcome_requirement.threshold,
                "cross_mass": c.multi_outcome_requirement.cross_mass,
                "avg_abs_cross": c.multi_outcome_requirement.avg_abs_cross,
                "vacuous": c.multi_outcome_requirement.vacuous,
                "degenerate": c.multi_outcome_requirement.degenerate,
                "feasible": c.multi_outcome_requirement.feasible,
            },
            "cross_mass_actual": c.cross_mass_actual,
            "bounds": {
                "vdc": _bound_to_dict(c.vdc),
                "eigen": _bound_to_dict(c.eigen),
                "multi_outcome": _bound_to_dict(c.multi_outcome),
            },
            "feasible": c.feasible,
        },
        "sphere": None
        if s is None
        else {
            "n": s.n,
            "p": s.p,
            "trials": s.trials,
            "singular_values": s.singular_values,
            "sigma1_sq": s.sigma1_sq,
            "expected_sum_sq": s.expected_sum_sq,
            "mc": _mc_to_dict(s.mc),
            "ks_distance": s.ks_distance,
        },
        "aggregate": None
        if r.aggregate is None
        else {
            "count": r.aggregate.count,
            "multiplier": r.aggregate.multiplier,
            "activation_prob": r.aggregate.activation_prob,
            "sd_log": r.aggregate.sd_log,
            "low_multiplier": r.aggregate.low_multiplier,
            "high_multiplier": r.aggregate.high_multiplier,
        },
        "logistic": None
        if r.logistic is None
        else {
            "count": r.logistic.count,
            "per_effect_logit": r.logistic.per_effect_logit,
            "total_logit": r.logistic.total_logit,
            "swing_low": r.logistic.swing_low,
            "swing_high": r.logistic.swing_high,
        },
        "mi": None
        if r.mi is None
        else {
            "outcome_index": r.mi.outcome_index,
            "units": r.mi.units,
            "per_var_mi": list(r.mi.report.per_var_mi),
            "per_var_leaveout_mi": list(r.mi.report.per_var_leaveout_mi),
            "h_y": r.mi.report.h_y,
            "lhs": r.mi.report.lhs,
            "rhs": r.mi.report.rhs,
            "satisfied": r.mi.report.satisfied,
            "slack": r.mi.slack,
        },
        "tightness": None
        if r.tightness is None
        else {
            "p": r.tightness.p,
            "tau": r.tightness.tau,
            "implied_corr": r.tightness.implied_corr,
            "off_diagonal": r.tightness.off_diagonal,
            "sum_sq_corr": r.tightness.sum_sq_corr,
            "lambda_max": r.tightness.lambda_max,
            "gap": r.tightness.gap,
        },
    }


def report_from_dict(d: dict) -> DiagnosticReport:
    dataset = None
    if d.get("dataset") is not None:
        ds = d["dataset"]
        dataset = DatasetAuditSection(
            n=ds["n"],
            p=ds["p"],
            outcome=ds["outcome"],
            predictors=list(ds["predictors"]),
            predictor_correlations=[list(row) for row in ds["predictor_correlations"]],
            outcome_correlations=list(ds["outcome_correlations"]),
            spectrum=list(ds["spectrum"]),
            vdc=_bound_from_dict(ds["bounds"]["vdc"]),
            eigen=_bound_from_dict(ds["bounds"]["eigen"]),
            regression=_bound_from_dict(ds["bounds"]["regression"]),
            beta=list(ds["beta"]),
            lambda_min=ds["lambda_min"],
            singular_values=list(ds["singular_values"]),
            sigma1_sq=ds["sigma1_sq"],
            expected_sum_sq=ds["expected_sum_sq"],
            mc=_mc_from_dict(ds["mc"]),
        )
    claims = None
    if d.get("claims") is not None:
        cs = d["claims"]
        base = cs["base_requirement"]
        mo = cs["multi_outcome_requirement"]
        claims = ClaimsSection(
            p=cs["p"],
            tau=list(cs["tau"]),
            tau_min=cs["tau_min"],
            eps=cs["eps"],
            cross_supplied=cs["cross_supplied"],
            base_requirement=MassRequirement(
                cross_mass=base["cross_mass"],
                avg_abs_cross=base["avg_abs_cross"],
                vacuous=base["vacuous"],
                feasible=base["feasible"],
            ),
            multi_outcome_requirement=None
            if mo is None
            else MultiOutcomeRequirement(
                eps=mo["eps"],
                threshold=mo["threshold"],
                cross_mass=mo["cross_mass"],
                avg_abs_cross=mo["avg_abs_cross"],
                vacuous=mo["vacuous"],
                degenerate=mo["degenerate"],
                feasible=mo["feasible"],
            ),
            cross_mass_actual=cs["cross_mass_actual"],
            vdc=_bound_from_dict(cs["bounds"]["vdc"]),
            eigen=_bound_from_dict(cs["bounds"]["eigen"]),
            multi_outcome=_bound_from_dict(cs["bounds"]["multi_outcome"]),
            feasible=cs["feasible"],
        )
    sphere = None
    if d.get("sphere") is not None:
        sp = d["sphere"]
        sphere = SphereSection(
            n=sp["n"],
            p=sp["p"],
            trials=sp["trials"],
            singular_values=list(sp["singular_values"]),
            sigma1_sq=sp["sigma1_sq"],
            expected_sum_sq=sp["expected_sum_sq"],
            mc=_mc_from_dict(sp["mc"]),
            ks_distance=sp["ks_distance"],
        )
    aggregate = None
    if d.get("aggregate") is not None:
        ag = d["aggregate"]
        aggregate = AggregateSection(
            count=ag["count"],
            multiplier=ag["multiplier"],
            activation_prob=ag["activation_prob"],
            sd_log=ag["sd_log"],
            low_multiplier=ag["low_multiplier"],
            high_multiplier=ag["high_multiplier"],
        )
    logistic = None
    if d.get("logistic") is not None:
        lg = d["logistic"]
        logistic = LogisticSection(
            count=lg["count"],
            per_effect_logit=lg["per_effect_logit"],
            total_logit=lg["total_logit"],
            swing_low=lg["swing_low"],
            swing_high=lg["swing_high"],
        )
    mi = None
    if d.get("mi") is not None:
        m = d["mi"]
        mi = MiSection(
            outcome_index=m["outcome_index"],
            units=m["units"],
            report=MIReport(
                per_var_mi=tuple(m["per_var_mi"]),
                per_var_leaveout_mi=tuple(m["per_var_leaveout_mi"]),
                h_y=m["h_y"],
                lhs=m["lhs"],
                rhs=m["rhs"],
                satisfied=m["satisfied"],
            ),
            slack=m["slack"],
        )
    tightness = None
    if d.get("tightness") is not None:
        t = d["tightness"]
        tightness = TightnessSection(
            p=t["p"],
            tau=t["tau"],
            implied_corr=t["implied_corr"],
            off_diagonal=t["off_diagonal"],
            sum_sq_corr=t["sum_sq_corr"],
            lambda_max=t["lambda_max"],
            gap=t["gap"],
        )
    return DiagnosticReport(
        version=d["version"],
        mode=d["mode"],
        seed=d["seed"],
        dataset=dataset,
        claims=claims,
        sphere=sphere,
        aggregate=aggregate,
        logistic=logistic,
        mi=mi,
        tightness=tightness,
    )


def _fmt(v: float) -> str:
    return repr(float(v))


def _bound_lines(label: str, b: BoundReport) -> list[str]:
    verdict = "satisfied" if b.satisfied else "VIOLATED"
    return [
        f"  {label}: lhs = {_fmt(b.lhs)}  rhs = {_fmt(b.rhs)}  "
        f"[{verdict}, slack = {_fmt(b.slack)}]"
    ]


def _clamp_display(v: float) -> float:
    """Clamp tiny negative rounding residue for display only."""
    return 0.0 if -1e-12 <= v < 0.0 else v


def render_text(r: DiagnosticReport) -> str:
    lines = [f"{TOOL_NAME} report (version {r.version}, mode {r.mode})"]
    if r.seed is not None:
        lines.append(f"seed: {r.seed}")
    if r.dataset is not None:
        d = r.dataset
        lines.append(f"dataset: n = {d.n}, p = {d.p}, outcome = {d.outcome!r}")
        lines.append(f"predictors: {', '.join(d.predictors)}")
        lines += _bound_lines("sum |corr|   vs sqrt(p + cross mass)", d.vdc)
        lines += _bound_lines("sum corr^2   vs lambda_max", d.eigen)
        lines += _bound_lines("||beta||^2   vs 1/lambda_min", d.regression)
        lines.append(f"  worst-case sum of squared correlations: {_fmt(d.sigma1_sq)}")
        lines.append(
            f"  sphere average of sum corr^2: exact {_fmt(d.expected_sum_sq)}, "
            f"simulated {_fmt(d.mc.mean)} (stderr {_fmt(d.mc.stderr)}, "
            f"{d.mc.trials} trials)"
        )
        ok = d.vdc.satisfied and d.eigen.satisfied and d.regression.satisfied
        lines.append(f"verdict: {'all bounds satisfied' if ok else 'BOUND VIOLATED'}")
    if r.claims is not None:
        c = r.claims
        lines.append(f"claims: p = {c.p}, tau_min = {_fmt(c.tau_min)}")
        req = c.base_requirement
        if req.vacuous:
            lines.append("  claims are compatible with uncorrelated variables")
        else:
            lines.append(
                f"  claims jointly require cross-correlation mass >= {_fmt(req.cross_mass)}"
            )
            if req.avg_abs_cross is not None:
                lines.append(
                    f"  claims jointly require average |cross-correlation| >= "
                    f"{_fmt(req.avg_abs_cross)}"
                )
        mo = c.multi_outcome_requirement
        if mo is not None:
            if mo.degenerate:
                lines.append(
                    f"  multi-outcome bound degenerate (tau_min < sqrt(2 eps)); "
                    f"no requirement at eps = {_fmt(mo.eps)}"
                )
            elif mo.vacuous:
                lines.append(
                    f"  multi-outcome requirement at eps = {_fmt(mo.eps)} is vacuous"
                )
            else:
                lines.append(
                    f"  with outcomes correlated >= 1 - {_fmt(mo.eps)}: "
                    f"cross mass >= {_fmt(mo.cross_mass)}"
                )
        if c.cross_mass_actual is not None:
            lines.append(f"  actual cross-correlation mass: {_fmt(c.cross_mass_actual)}")
        for label, b in (("vdc", c.vdc), ("eigen", c.eigen), ("multi-outcome", c.multi_outcome)):
            if b is not None:
                lines += _bound_lines(label, b)
        lines.append(f"verdict: {'feasible' if c.feasible else 'INFEASIBLE'}")
    if r.sphere is not None:
        s = r.sphere
        lines.append(f"sphere simulation: n = {s.n}, p = {s.p}, trials = {s.trials}")
        lines.append(f"  exact mean of sum corr^2: {_fmt(s.expected_sum_sq)}")
        lines.append(
            f"  simulated mean: {_fmt(s.mc.mean)} (stderr {_fmt(s.mc.stderr)})"
        )
        lines.append(f"  worst case (top squared singular value): {_fmt(s.sigma1_sq)}")
        lines.append(f"  KS distance to chi-square mixture: {_fmt(s.ks_distance)}")
    if r.aggregate is not None:
        a = r.aggregate
        lines.append(
            f"aggregate: {a.count} effects x {_fmt(a.multiplier)} "
            f"(activation probability {_fmt(a.activation_prob)})"
        )
        lines.append(f"  sd of total log effect: {_fmt(a.sd_log)} (~ {a.sd_log:.2f})")
        lines.append(
            f"  one-sd multiplier band: {_fmt(a.low_multiplier)} to "
            f"{_fmt(a.high_multiplier)} (~ {a.low_multiplier:.2g} to {a.high_multiplier:.2g})"
        )
    if r.logistic is not None:
        lg = r.logistic
        lines.append(
            f"logistic: {lg.count} inputs x {_fmt(lg.per_effect_logit)} on the log-odds scale"
        )
        lines.append(f"  total logit: {_fmt(lg.total_logit)}")
        lines.append(
            f"  probability swing: {_fmt(lg.swing_low)} to {_fmt(lg.swing_high)} "
            f"(~ {lg.swing_low:.2f} to {lg.swing_high:.2f})"
        )
    if r.mi is not None:
        m = r.mi
        lines.append(f"mutual information ({m.units}), outcome index {m.outcome_index}")
        lines.append(f"  H(y) = {_fmt(_clamp_display(m.report.h_y))}")
        per = ", ".join(_fmt(_clamp_display(v)) for v in m.report.per_var_mi)
        lines.append(f"  I(X_i; y): {per}")
        red = ", ".join(_fmt(_clamp_display(v)) for v in m.report.per_var_leaveout_mi)
        lines.append(f"  I(X_i; X_-i): {red}")
        lines.append(
            f"  sum I(X_i; y) = {_fmt(_clamp_display(m.report.lhs))}  vs  "
            f"H(y) + sum I(X_i; X_-i) = {_fmt(_clamp_display(m.report.rhs))}"
        )
        lines.append(
            f"verdict: {'satisfied' if m.report.satisfied else 'VIOLATED'} "
            f"(slack = {_fmt(m.slack)})"
        )
    if r.tightness is not None:
        t = r.tightness
        lines.append(f"tightness construction: p = {t.p}, tau = {_fmt(t.tau)}")
        lines.append(f"  off-diagonal correlation: {_fmt(t.off_diagonal)}")
        lines.append(f"  implied corr(X_i, y): {_fmt(t.implied_corr)}")
        lines.append(
            f"  sum corr^2 = {_fmt(t.sum_sq_corr)}  vs  lambda_max = {_fmt(t.lambda_max)} "
            f"(gap {_fmt(t.gap)})"
        )
    return "\n".join(lines) + "\n"


def render_report(r: DiagnosticReport, output_format: str = "json") -> str:
    """Serialize a report; 'json' round-trips losslessly, 'text' is for humans."""
    if output_format == "json":
        return json.dumps(report_to_dict(r), indent=2) + "\n"
    if output_format == "text":
        return render_text(r)
    raise ValueError(f"output format must be 'json' or 'text', got {output_format!r}")


def parse_report(serialized: str) -> DiagnosticReport:
    """Inverse of JSON rendering: parse_report(render_report(r)) == r."""
    return report_from_dict(json.loads(serialized))
