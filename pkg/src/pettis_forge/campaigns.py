"""Seeded verification campaigns and report assembly.

Every campaign is a pure function of (model, config): all randomness comes
from the config seed, rows are emitted in a fixed order, and floats are
serialized with shortest round-trip repr, so identical configs produce
byte-identical reports.  Each row carries the inputs, the computed values,
the target bound, and a pass flag recomputable from the row's own columns.

Hard assertions always use the sound side of an enclosure (the lower bound
against gauge targets).  The averaged-rate campaign additionally reports a
median trend without asserting any limit: a vanishing-rate statement over
all points is not decidable from finitely many samples, and the summary
says so explicitly.
"""

from __future__ import annotations

import json
import math
import random
import statistics
from dataclasses import dataclass

from .blocks import Functional
from .continuous import ContinuousModel, check_pair
from .errors import ConfigError, DepthInsufficientError
from .intervals import Interval, IntervalSet
from .pettis import PettisModel, bochner_level_masses, pettis_integral, scalar_integral
from .psi import GrowthReport, PsiSpec, SequenceRule, eval_psi_total, validate_growth

LOWER_BOUND = "lower-bound"
PAIRING = "pairing"
BLOWUP = "blowup"
HALFPOWER = "halfpower"
CONTINUOUS = "continuous"
BOCHNER = "bochner"
PSI_VALIDATE = "psi-validate"

CAMPAIGN_KINDS = (LOWER_BOUND, PAIRING, BLOWUP, HALFPOWER, CONTINUOUS, BOCHNER, PSI_VALIDATE)

#: Absolute slack on interval lower-bound assertions (exact dyadic regime).
BOUND_SLACK = 1e-12

#: Relative slack on the two-code-path pairing identity.
PAIRING_SLACK = 1e-9

_RATE_LIMIT_NOTE = (
    "vanishing-rate limit not decidable from finite samples; median trend is informative only"
)


@dataclass(frozen=True)
class CampaignConfig:
    """Knobs shared by all campaigns; unused fields are ignored per kind."""

    kind: str
    samples: int = 10_000
    seed: int = 20260810
    dyadic_level: int = 12
    t_grid: tuple[float, ...] = (0.0, 0.3, 1.0 / 3.0, 0.9)
    j_min: int = 4
    j_max: int = 20
    interval: tuple[float, float] = (0.25, 0.5)
    sets: int = 50
    set_parts_max: int = 4
    support_max: int = 8
    delta_levels: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8)
    out: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.kind not in CAMPAIGN_KINDS:
            raise ConfigError(f"unknown campaign kind {self.kind!r}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if not (0 <= self.j_min < self.j_max <= 40):
            raise ConfigError(f"need 0 <= j_min < j_max <= 40, got [{self.j_min}, {self.j_max}]")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")


@dataclass
class Report:
    """Ordered rows plus a summary; serializes deterministically."""

    campaign: str
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_csv_text(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "campaign": self.campaign,
            "columns": list(self.columns),
            "rows": [list(r) for r in self.rows],
            "summary": self.summary,
            "violations": self.violations,
            "pass": self.passed,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True, indent=2) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv_text()
        if fmt == "json":
            return self.to_json_text()
        raise ConfigError(f"unknown report format {fmt!r}")

    def summary_lines(self) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        out = [f"[{status}] {self.campaign}: {len(self.rows)} rows, {self.violations} violations"]
        for key in sorted(self.summary):
            out.append(f"  {key}: {self.summary[key]}")
        return out


def _fmt(v: object) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


# ---------------------------------------------------------------------------
# Samplers (all driven by the config seed)
# ---------------------------------------------------------------------------


def _random_interval(rng: random.Random, min_measure: float) -> Interval:
    for _ in range(100_000):
        a, b = rng.random(), rng.random()
        lo, hi = (a, b) if a <= b else (b, a)
        if hi - lo >= min_measure:
            return Interval(lo, hi)
    raise DepthInsufficientError(
        f"could not sample an interval of measure >= {min_measure}"
    )


def _random_interval_set(rng: random.Random, parts_max: int) -> IntervalSet:
    parts = rng.randint(1, parts_max)
    points = sorted(rng.random() for _ in range(2 * parts))
    return IntervalSet.of(
        *(Interval(points[2 * i], points[2 * i + 1]) for i in range(parts))
    )


def _random_functional(rng: random.Random, model: PettisModel, support_max: int) -> Functional:
    size = rng.randint(1, support_max)
    coeffs: dict[tuple[int, int], float] = {}
    for _ in range(size):
        n = rng.randint(1, model.depth)
        k = rng.randint(1, 1 << n)
        coeffs[(n, k)] = rng.uniform(-1.0, 1.0)
    return Functional(model.layout, coeffs)


def _certified_floor(model: PettisModel) -> float:
    """Smallest interval measure for which the truncated chain is provable."""
    levels = model.table.levels
    if len(levels) < 2:
        raise DepthInsufficientError("model realizes fewer than two levels")
    return math.ldexp(4.0, -levels[-2])


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------


def run_lower_bound_sweep(model: PettisModel, cfg: CampaignConfig) -> Report:
    """Interval lower bound: enclosure lower >= psi(measure) on every row.

    Sweeps all dyadic cells up to cfg.dyadic_level plus cfg.samples seeded
    random intervals above the certified measure floor.
    """
    floor = _certified_floor(model)
    if math.ldexp(1.0, -cfg.dyadic_level) < floor:
        raise DepthInsufficientError(
            f"dyadic level {cfg.dyadic_level} is below the certified measure floor {floor}"
        )
    columns = ("idx", "lo", "hi", "measure", "psi", "lower", "upper", "pass")
    rows: list[tuple] = []
    violations = 0
    idx = 0

    def emit(iv: Interval) -> None:
        nonlocal idx, violations
        enc = pettis_integral(model, iv)
        target = eval_psi_total(model.psi, iv.measure)
        ok = enc.lower >= target - BOUND_SLACK
        if not ok:
            violations += 1
        rows.append((idx, iv.lo, iv.hi, iv.measure, target, enc.lower, enc.upper, ok))
        idx += 1

    for m in range(cfg.dyadic_level + 1):
        for k in range(1, (1 << m) + 1):
            emit(Interval(math.ldexp(k - 1, -m), math.ldexp(k, -m)))
    dyadic_rows = idx
    rng = random.Random(cfg.seed)
    rejected = 0
    accepted = 0
    while accepted < cfg.samples:
        a, b = rng.random(), rng.random()
        lo, hi = (a, b) if a <= b else (b, a)
        if hi - lo < floor:
            rejected += 1
            if rejected > 100 * cfg.samples + 1000:
                raise DepthInsufficientError("random sampling rejected too often; deepen the model")
            continue
        emit(Interval(lo, hi))
        accepted += 1
    summary = {
        "dyadic_rows": dyadic_rows,
        "random_rows": accepted,
        "rejected_samples": rejected,
        "measure_floor": floor,
        "violations": violations,
    }
    return Report(LOWER_BOUND, columns, rows, summary, violations)


def run_pairing_check(model: PettisModel, cfg: CampaignConfig) -> Report:
    """Pairing identity: functional-of-integral equals integral-of-pairing.

    The left side pairs the functional with the closed-form truncated
    integral; the right side integrates the scalar function through
    materialized carrier sets.  The two code paths share only the interval
    data itself.
    """
    rng = random.Random(cfg.seed)
    functionals = [_random_functional(rng, model, cfg.support_max) for _ in range(cfg.samples)]
    interval_sets = [_random_interval_set(rng, cfg.set_parts_max) for _ in range(cfg.sets)]
    enclosures = [pettis_integral(model, E) for E in interval_sets]
    columns = ("idx", "functional_norm", "lhs", "rhs", "abs_err", "tol", "pass")
    rows: list[tuple] = []
    violations = 0
    idx = 0
    for x in functionals:
        qn = x.dual_norm()
        tol = PAIRING_SLACK * (1.0 + qn)
        for E, enc in zip(interval_sets, enclosures):
            lhs = enc.apply(x)
            rhs = scalar_integral(model, x, E)
            err = abs(lhs - rhs)
            ok = err <= tol
            if not ok:
                violations += 1
            rows.append((idx, qn, lhs, rhs, err, tol, ok))
            idx += 1
    summary = {
        "functionals": len(functionals),
        "interval_sets": len(interval_sets),
        "violations": violations,
    }
    return Report(PAIRING, columns, rows, summary, violations)


def run_blowup(model: PettisModel, cfg: CampaignConfig) -> Report:
    """Averaged-integral blow-up: (1/h) * lower >= psi(h)/h on a (t, j) grid."""
    floor = _certified_floor(model)
    if math.ldexp(1.0, -cfg.j_max) < floor:
        raise DepthInsufficientError(
            f"j_max {cfg.j_max} gives intervals below the certified floor {floor}"
        )
    columns = ("t", "j", "h", "lower_over_h", "floor", "pass")
    rows: list[tuple] = []
    violations = 0
    skipped = 0
    for t in cfg.t_grid:
        for j in range(cfg.j_min, cfg.j_max + 1):
            h = math.ldexp(1.0, -j)
            if t + h > 1.0:
                skipped += 1
                continue
            enc = pettis_integral(model, Interval(t, t + h))
            value = enc.lower / h
            bound = eval_psi_total(model.psi, h) / h
            ok = enc.lower >= eval_psi_total(model.psi, h) - BOUND_SLACK
            if not ok:
                violations += 1
            rows.append((t, j, h, value, bound, ok))
    summary = {
        "grid_points": len(rows),
        "skipped_out_of_domain": skipped,
        "violations": violations,
    }
    return Report(BLOWUP, columns, rows, summary, violations)


def run_halfpower_statistic(model: PettisModel, cfg: CampaignConfig) -> Report:
    """Square-root-rate regime: hard floor assertion plus a median trend.

    Asserts only the sandwich floor h^(-1/2) * upper >= psi(h) / sqrt(h);
    the almost-everywhere vanishing-rate statement is flagged as not
    decidable and reported as a per-j median of the normalized rates.
    """
    if model.p != 2.0:
        raise ConfigError("halfpower campaign requires the p = 2 backend")
    rng = random.Random(cfg.seed)
    h_max = math.ldexp(1.0, -cfg.j_min)
    ts = [rng.random() * (1.0 - h_max) for _ in range(cfg.samples)]
    columns = ("t", "j", "h", "ratio", "floor", "pass")
    rows: list[tuple] = []
    violations = 0
    per_j: dict[int, list[float]] = {j: [] for j in range(cfg.j_min, cfg.j_max + 1)}
    for t in ts:
        for j in range(cfg.j_min, cfg.j_max + 1):
            h = math.ldexp(1.0, -j)
            enc = pettis_integral(model, Interval(t, t + h))
            ratio = enc.upper / math.sqrt(h)
            bound = eval_psi_total(model.psi, h) / math.sqrt(h)
            ok = ratio >= bound - BOUND_SLACK
            if not ok:
                violations += 1
            per_j[j].append(ratio)
            rows.append((t, j, h, ratio, bound, ok))
    summary = {
        "note": _RATE_LIMIT_NOTE,
        "median_trend": {str(j): statistics.median(v) for j, v in per_j.items() if v},
        "violations": violations,
    }
    return Report(HALFPOWER, columns, rows, summary, violations)


def run_continuous_campaign(model: ContinuousModel, cfg: CampaignConfig) -> Report:
    """Everywhere separation plus the uniform-continuity modulus witness."""
    rng = random.Random(cfg.seed)
    floor = model.separation_floor()
    columns = ("s", "t", "dist", "lhs", "rhs", "pass", "modulus", "modulus_pass")
    rows: list[tuple] = []
    violations = 0
    rejected = 0
    lipschitz = model.lipschitz_constant()
    tail2 = 2.0 * model.tail()
    accepted = 0
    observed: list[tuple[float, float]] = []
    while accepted < cfg.samples:
        s, t = rng.random(), rng.random()
        d = abs(s - t)
        if d <= floor:
            rejected += 1
            if rejected > 100 * cfg.samples + 1000:
                raise DepthInsufficientError("pair sampling rejected too often; deepen the model")
            continue
        pc = check_pair(model, s, t)
        mod = lipschitz * d + tail2
        mod_ok = pc.lhs <= mod * (1.0 + 1e-9)
        if not pc.holds or not mod_ok:
            violations += 1
        observed.append((d, pc.lhs))
        rows.append((s, t, d, pc.lhs, pc.rhs, pc.holds, mod, mod_ok))
        accepted += 1
    delta_table = {}
    for g in cfg.delta_levels:
        delta = math.ldexp(1.0, -g)
        close = [lhs for d, lhs in observed if d <= delta]
        delta_table[str(g)] = {
            "delta": delta,
            "observed_sup": max(close, default=0.0),
            "bound": lipschitz * delta + tail2,
            "pairs": len(close),
        }
    summary = {
        "pairs": accepted,
        "rejected_too_close": rejected,
        "distance_floor": floor,
        "modulus_table": delta_table,
        "violations": violations,
    }
    return Report(CONTINUOUS, columns, rows, summary, violations)


def run_bochner_divergence(model: PettisModel, cfg: CampaignConfig) -> Report:
    """Strong-norm partial sums on a fixed interval: monotone, ratio-growing.

    Row N asserts S_N >= S_(N-1) and, inside the certified window,
    S_N >= 1.5 * S_(N-4).
    """
    lo, hi = cfg.interval
    if not (0.0 <= lo < hi <= 1.0):
        raise ConfigError(f"bochner campaign needs an interval of positive measure, got {cfg.interval}")
    iv = Interval(lo, hi)
    masses = bochner_level_masses(model, iv)
    partial = []
    acc = 0.0
    for n in range(1, model.depth + 1):
        acc += masses.get(n, 0.0)
        partial.append(acc)
    columns = ("N", "s", "s_prev", "s_prev4", "ratio4", "pass")
    rows: list[tuple] = []
    violations = 0
    for n in range(1, model.depth + 1):
        s = partial[n - 1]
        s_prev = partial[n - 2] if n >= 2 else 0.0
        s_prev4 = partial[n - 5] if n >= 5 else None
        ratio4 = (s / s_prev4) if s_prev4 else None
        ok = s >= s_prev
        if n >= 12 and ratio4 is not None:
            ok = ok and ratio4 >= 1.5
        if not ok:
            violations += 1
        rows.append((n, s, s_prev, s_prev4, ratio4, ok))
    summary = {
        "interval": [lo, hi],
        "final_partial_sum": partial[-1],
        "certified_window": [12, model.depth],
        "violations": violations,
    }
    return Report(BOCHNER, columns, rows, summary, violations)


def run_psi_validate(
    spec: PsiSpec,
    p: float,
    rule: SequenceRule,
    cfg: CampaignConfig,
    n_max: int = 48,
    r_max: float = 0.95,
) -> Report:
    """Growth certificate as a report; FAIL is a finding, not an error."""
    report: GrowthReport = validate_growth(spec, p, rule, n_max=n_max, r_max=r_max)
    columns = ("n", "p_n", "term", "ratio", "certified")
    rows: list[tuple] = []
    for i, term in enumerate(report.terms, start=1):
        ratio = report.terms[i - 1] / report.terms[i - 2] if i >= 2 and report.terms[i - 2] > 0 else None
        certified = report.passed and report.n0 is not None and i >= report.n0
        rows.append((i, rule.term(i), term, ratio, certified))
    violations = 0 if report.passed else 1
    summary = {
        "pass": report.passed,
        "n0": report.n0,
        "ratio": report.ratio,
        "r_max": r_max,
        "n_max": report.n_max,
        "p": "inf" if math.isinf(p) else p,
    }
    return Report(PSI_VALIDATE, columns, rows, summary, violations)
