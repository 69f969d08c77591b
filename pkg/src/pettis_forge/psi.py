"""Gauge functions, growth certificates, and coefficient schedules.

A gauge is a nondecreasing function psi: [0, inf) -> [0, inf).  A gauge
belongs to the admissible class for exponent p when, for some strictly
increasing integer sequence {p_n} with p_0 = 0, the series

    sum_n  psi(4 * 2^-p_(n-1)) * (2^p_n)^(1/p)

converges (exponent 1/inf reads as 0, so the factor is 1 for p = inf).
Validation here is a certified eventual-ratio test rather than symbolic
convergence: a PASS pins an index n0 and a ratio r < 1 with
term_(n+1) <= r * term_n for all n >= n0, which yields the computable
geometric tail bounds reused by the integral enclosures.

Logarithmic families are defined by their formulas only below a threshold
(1/e, resp. e^-e); above it the formulas stop being monotone.  Because the
forced p_0 = 0 makes every coefficient schedule start at psi(4), the
package also provides a total monotone extension that continues each log
family as a multiple of sqrt(s) above its threshold (continuously), and the
validators and schedules evaluate through that extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import ConfigError, GrowthConditionError, PsiDomainError

POWER = "power"
SQRT_LOG = "sqrt-log"
SQRT_LOGLOG = "sqrt-loglog"
CUSTOM_TABLE = "custom-table"

_FAMILIES = (POWER, SQRT_LOG, SQRT_LOGLOG, CUSTOM_TABLE)

#: Formula domain thresholds for the logarithmic families.
SQRT_LOG_THRESHOLD = 1.0 / math.e
SQRT_LOGLOG_THRESHOLD = math.exp(-math.e)

DEFAULT_RATIO_CAP = 0.95
DEFAULT_TERM_COUNT = 48
MAX_TERM_COUNT = 64


@dataclass(frozen=True)
class PsiSpec:
    """A gauge family with its parameters and default norm exponent."""

    family: str
    exponent: float | None = None  # power family: psi(s) = s^exponent
    epsilon: float | None = None  # log families: the 1 + epsilon power
    knots: tuple[tuple[float, float], ...] = ()  # custom-table
    p: float = 2.0

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ConfigError(f"unknown gauge family {self.family!r}")
        if self.family == POWER:
            if self.exponent is None or self.exponent <= 0:
                raise ConfigError("power family needs exponent > 0")
        elif self.family in (SQRT_LOG, SQRT_LOGLOG):
            if self.epsilon is None or self.epsilon <= 0:
                raise ConfigError(f"{self.family} family needs epsilon > 0")
        else:
            k = self.knots
            if len(k) < 2 or k[0][0] != 0.0 or k[0][1] != 0.0:
                raise ConfigError("custom-table needs knots starting at (0, 0)")
            for (s0, v0), (s1, v1) in zip(k, k[1:]):
                if s1 <= s0 or v1 < v0:
                    raise ConfigError("custom-table knots must increase in s and not decrease in value")
        if not (1.0 <= self.p):
            raise ConfigError(f"norm exponent must be >= 1, got {self.p}")

    def threshold(self) -> float | None:
        if self.family == SQRT_LOG:
            return SQRT_LOG_THRESHOLD
        if self.family == SQRT_LOGLOG:
            return SQRT_LOGLOG_THRESHOLD
        return None

    def to_json(self) -> dict:
        out: dict = {"family": self.family, "p": _p_json(self.p)}
        if self.exponent is not None:
            out["exponent"] = self.exponent
        if self.epsilon is not None:
            out["epsilon"] = self.epsilon
        if self.knots:
            out["knots"] = [list(k) for k in self.knots]
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "PsiSpec":
        try:
            return cls(
                family=str(obj["family"]),
                exponent=obj.get("exponent"),
                epsilon=obj.get("epsilon"),
                knots=tuple((float(s), float(v)) for s, v in obj.get("knots", ())),
                p=parse_exponent(obj.get("p", 2.0)),
            )
        except KeyError as exc:
            raise ConfigError(f"gauge spec missing field {exc}") from exc


def _p_json(p: float) -> float | str:
    return "inf" if math.isinf(p) else p


def parse_exponent(value: object) -> float:
    """Norm exponent from JSON: a number, or the string 'inf'."""
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        raise ConfigError(f"bad norm exponent {value!r}")
    try:
        p = float(value)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad norm exponent {value!r}") from exc
    if p < 1.0:
        raise ConfigError(f"norm exponent must be >= 1, got {p}")
    return p


def eval_psi(spec: PsiSpec, s: float) -> float:
    """Gauge value at s >= 0; log families only below their threshold."""
    if s < 0.0:
        raise PsiDomainError(f"gauge argument {s} is negative")
    th = spec.threshold()
    if th is not None and s >= th:
        raise PsiDomainError(
            f"{spec.family} formula is only monotone below {th:.6g}; got s={s:.6g}"
        )
    return _eval_formula(spec, s)


def eval_psi_total(spec: PsiSpec, s: float) -> float:
    """Total monotone extension: formula below the threshold, a continuous
    sqrt(s) continuation at and above it.  Identical to eval_psi for the
    power and custom-table families."""
    if s < 0.0:
        raise PsiDomainError(f"gauge argument {s} is negative")
    th = spec.threshold()
    if th is None or s < th:
        return _eval_formula(spec, s)
    if spec.family == SQRT_LOG:
        # At s = 1/e the log factor equals 1, so the continuation is sqrt(s).
        return math.sqrt(s)
    # At s = e^-e the factors equal 1/e and 1.
    return math.sqrt(s) / math.e


def _eval_formula(spec: PsiSpec, s: float) -> float:
    if spec.family == POWER:
        return s ** spec.exponent  # type: ignore[operator]
    if s == 0.0:
        return 0.0
    if spec.family == SQRT_LOG:
        log1 = math.log(1.0 / s)
        return math.sqrt(s) * (1.0 / log1) ** (1.0 + spec.epsilon)  # type: ignore[operator]
    if spec.family == SQRT_LOGLOG:
        log1 = math.log(1.0 / s)
        return (
            math.sqrt(s)
            * (1.0 / log1)
            * (1.0 / math.log(log1)) ** (1.0 + spec.epsilon)  # type: ignore[operator]
        )
    return _interp(spec.knots, s)


def _interp(knots: Sequence[tuple[float, float]], s: float) -> float:
    if s >= knots[-1][0]:
        return knots[-1][1]
    lo, hi = 0, len(knots) - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if knots[mid][0] <= s:
            lo = mid
        else:
            hi = mid
    s0, v0 = knots[lo]
    s1, v1 = knots[hi]
    return v0 + (v1 - v0) * (s - s0) / (s1 - s0)


# ---------------------------------------------------------------------------
# Level sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SequenceRule:
    """Strictly increasing integer levels p_n with p_0 = 0 forced.

    ``affine``: p_n = ceil(a * n) + b (a >= 1 keeps it strictly increasing).
    ``list``: explicit values for p_1, p_2, ...
    """

    kind: str
    a: float = 1.0
    b: int = 0
    values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind == "affine":
            if self.a < 1.0:
                raise ConfigError(f"affine slope must be >= 1, got {self.a}")
            if math.ceil(self.a) + self.b < 1:
                raise ConfigError("affine rule must give p_1 >= 1")
        elif self.kind == "list":
            vs = self.values
            if not vs or vs[0] < 1 or any(y <= x for x, y in zip(vs, vs[1:])):
                raise ConfigError("list rule needs strictly increasing positive integers")
        else:
            raise ConfigError(f"unknown sequence rule kind {self.kind!r}")

    def term(self, n: int) -> int:
        """p_n; raises ConfigError past the end of a list rule."""
        if n < 0:
            raise ConfigError(f"sequence index {n} is negative")
        if n == 0:
            return 0
        if self.kind == "affine":
            return math.ceil(self.a * n) + self.b
        if n > len(self.values):
            raise ConfigError(f"list rule has only {len(self.values)} entries, wanted p_{n}")
        return self.values[n - 1]

    def max_index(self) -> int | None:
        return None if self.kind == "affine" else len(self.values)

    def levels_within(self, depth: int) -> tuple[int, ...]:
        """All p_n with n >= 1 and p_n <= depth."""
        out = []
        n = 1
        while self.max_index() is None or n <= self.max_index():  # type: ignore[operator]
            v = self.term(n)
            if v > depth:
                break
            out.append(v)
            n += 1
        return tuple(out)

    def to_json(self) -> dict:
        if self.kind == "affine":
            return {"kind": "affine", "a": self.a, "b": self.b}
        return {"kind": "list", "list": list(self.values)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "SequenceRule":
        kind = str(obj.get("kind", "affine"))
        if kind == "affine":
            return cls("affine", a=float(obj.get("a", 1.0)), b=int(obj.get("b", 0)))
        values = obj.get("list", obj.get("values"))
        if not isinstance(values, Sequence):
            raise ConfigError("list rule needs a 'list' array")
        return cls("list", values=tuple(int(v) for v in values))


# ---------------------------------------------------------------------------
# Growth validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    """Outcome of the certified eventual-ratio test.

    When ``passed``, every consecutive term ratio from index n0 on is at
    most ``ratio`` (< 1), so the tail beyond any term is bounded by the
    first omitted term divided by (1 - ratio).
    """

    passed: bool
    p: float
    r_max: float
    n_max: int
    terms: tuple[float, ...]  # term_n for n = 1..n_max
    n0: int | None = None
    ratio: float | None = None

    def geometric_tail(self, first_omitted: float) -> float:
        if not self.passed or self.ratio is None:
            raise GrowthConditionError("no ratio certificate available")
        return first_omitted / (1.0 - self.ratio)

    def tail_after(self, n: int) -> float:
        """Upper bound on sum of term_m for m > n, valid for n >= n0."""
        if self.n0 is None or n < self.n0:
            raise GrowthConditionError(f"tail bound valid only from n0={self.n0}")
        if n >= len(self.terms):
            raise GrowthConditionError("tail_after beyond computed terms; use geometric_tail")
        return self.geometric_tail(self.terms[n])  # terms[n] is term_(n+1)

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "p": _p_json(self.p),
            "r_max": self.r_max,
            "n_max": self.n_max,
            "n0": self.n0,
            "ratio": self.ratio,
            "terms": list(self.terms),
        }


def growth_term(spec: PsiSpec, p: float, rule: SequenceRule, n: int) -> float:
    """term_n = psi(4 * 2^-p_(n-1)) * (2^p_n)^(1/p), via the total gauge."""
    arg = math.ldexp(4.0, -rule.term(n - 1))
    base = eval_psi_total(spec, arg)
    if math.isinf(p):
        return base
    return base * 2.0 ** (rule.term(n) / p)


def validate_growth(
    spec: PsiSpec,
    p: float | None = None,
    rule: SequenceRule | None = None,
    n_max: int = DEFAULT_TERM_COUNT,
    r_max: float = DEFAULT_RATIO_CAP,
) -> GrowthReport:
    """Certified eventual-ratio test of the growth series.

    PASS iff some n0 <= n_max/2 has term_(n+1)/term_n <= r_max for every
    n in [n0, n_max).  Failure is a value, not an error.
    """
    if rule is None:
        rule = SequenceRule("affine")
    if p is None:
        p = spec.p
    if not (2 <= n_max <= MAX_TERM_COUNT):
        raise ConfigError(f"n_max must be within [2, {MAX_TERM_COUNT}], got {n_max}")
    if not (0.0 < r_max < 1.0):
        raise ConfigError(f"r_max must be in (0, 1), got {r_max}")
    cap = rule.max_index()
    if cap is not None:
        n_max = min(n_max, cap)
        if n_max < 2:
            raise ConfigError("list rule too short for growth validation")
    terms = tuple(growth_term(spec, p, rule, n) for n in range(1, n_max + 1))
    return _certify(terms, p, r_max, n_max)


def _certify(terms: tuple[float, ...], p: float, r_max: float, n_max: int) -> GrowthReport:
    if not all(map(math.isfinite, terms)):
        return GrowthReport(False, p, r_max, n_max, terms)
    ratios = [
        (t1 / t0 if t0 > 0.0 else (0.0 if t1 == 0.0 else math.inf))
        for t0, t1 in zip(terms, terms[1:])
    ]
    for n0 in range(1, n_max // 2 + 1):
        if all(r <= r_max for r in ratios[n0 - 1 :]):
            return GrowthReport(True, p, r_max, n_max, terms, n0=n0, ratio=max(ratios[n0 - 1 :]))
    return GrowthReport(False, p, r_max, n_max, terms)


def summability_term(spec: PsiSpec, rule: SequenceRule, n: int) -> float:
    """u_n = psi(2^-p_n), the summand of the sup-norm regime series."""
    return eval_psi_total(spec, math.ldexp(1.0, -rule.term(n)))


def validate_summable(
    spec: PsiSpec,
    rule: SequenceRule | None = None,
    n_max: int = DEFAULT_TERM_COUNT,
    r_max: float = DEFAULT_RATIO_CAP,
) -> GrowthReport:
    """Ratio certificate for sum of psi(2^-p_n); the p = inf regime.

    Used by the continuous separation model, whose coefficients are
    2K * u_(n-2) and whose well-definedness needs this sum finite.
    """
    if rule is None:
        rule = SequenceRule("affine")
    if not (2 <= n_max <= MAX_TERM_COUNT):
        raise ConfigError(f"n_max must be within [2, {MAX_TERM_COUNT}], got {n_max}")
    if not (0.0 < r_max < 1.0):
        raise ConfigError(f"r_max must be in (0, 1), got {r_max}")
    cap = rule.max_index()
    if cap is not None:
        n_max = min(n_max, cap)
        if n_max < 2:
            raise ConfigError("list rule too short for summability validation")
    terms = tuple(summability_term(spec, rule, n) for n in range(1, n_max + 1))
    return _certify(terms, math.inf, r_max, n_max)


# ---------------------------------------------------------------------------
# Coefficient schedule
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientTable:
    """Sparse coefficient schedule c_m = 2K * psi(4 * 2^-p_(n-1)) at m = p_n.

    Carries the ratio certificate of its growth validation so that tail
    bounds stay computable past the realized depth.
    """

    spec: PsiSpec
    rule: SequenceRule
    K: float
    p: float
    depth: int
    levels: tuple[int, ...]  # realized p_n <= depth, n = 1..len(levels)
    coeffs: Mapping[int, float] = field(repr=False)  # level -> c
    ratio: float = 0.0
    n0: int = 1

    def coefficient(self, m: int) -> float:
        return self.coeffs.get(m, 0.0)

    def support(self) -> tuple[int, ...]:
        return self.levels

    def level_index(self, level: int) -> int:
        """n with p_n == level (1-based)."""
        return self.levels.index(level) + 1

    def to_json(self) -> dict:
        return {
            "K": self.K,
            "p": _p_json(self.p),
            "depth": self.depth,
            "levels": list(self.levels),
            "coeffs": {str(m): c for m, c in sorted(self.coeffs.items())},
            "ratio": self.ratio,
            "n0": self.n0,
        }


def coefficients(
    spec: PsiSpec,
    K: float = 1.0,
    p: float | None = None,
    rule: SequenceRule | None = None,
    depth: int = 24,
    n_max: int | None = None,
    r_max: float = DEFAULT_RATIO_CAP,
) -> CoefficientTable:
    """Coefficient schedule for the given gauge, or GrowthConditionError.

    The growth validation runs first with the same (spec, p, rule); its
    certificate (n0, ratio) is stored on the table.
    """
    if K < 1.0:
        raise ConfigError(f"basis constant K must be >= 1, got {K}")
    if rule is None:
        rule = SequenceRule("affine")
    if p is None:
        p = spec.p
    levels = rule.levels_within(depth)
    if not levels:
        raise ConfigError(f"no sequence level within depth {depth}")
    if n_max is None:
        n_max = min(MAX_TERM_COUNT, max(32, 2 * len(levels)))
    report = validate_growth(spec, p, rule, n_max=n_max, r_max=r_max)
    if not report.passed:
        raise GrowthConditionError(
            f"gauge {spec.family} failed growth validation for p={p} "
            f"(no ratio <= {r_max} certificate within {report.n_max} terms)"
        )
    coeffs = {
        level: 2.0 * K * eval_psi_total(spec, math.ldexp(4.0, -rule.term(n - 1)))
        for n, level in enumerate(levels, start=1)
    }
    return CoefficientTable(
        spec=spec,
        rule=rule,
        K=K,
        p=p,
        depth=depth,
        levels=levels,
        coeffs=coeffs,
        ratio=report.ratio or 0.0,
        n0=report.n0 or 1,
    )


def tail_bound(table: CoefficientTable, N: int) -> float:
    """Certified bound on sum of c_(p_m) * (2^p_m)^(1/p) over all p_m > N.

    Computed as the first omitted term divided by (1 - ratio); for list
    rules exhausted before the first omitted index, the last computable
    term is continued geometrically.
    """
    if N < table.rule.term(table.n0):
        raise ConfigError(f"tail bound requires N >= p_n0 = {table.rule.term(table.n0)}")
    factor = 2.0 * table.K
    m = 1
    cap = table.rule.max_index()
    while cap is None or m <= cap:
        if table.rule.term(m) > N:
            return factor * growth_term(table.spec, table.p, table.rule, m) / (1.0 - table.ratio)
        m += 1
    # List rule exhausted below N: continue the certified decay from the
    # last available term.
    last = cap  # type: ignore[assignment]
    last_term = growth_term(table.spec, table.p, table.rule, last)
    return factor * last_term * table.ratio / (1.0 - table.ratio)
