"""The step-carrier integrand, its weak integral, and certified enclosures.

The model function on [0, 1) is

    f(omega) = sum over realized levels m and cells k of
               c_m * 1_A(m,k)(omega) / mu(A(m,k)) * e(m, k),

where A(m, k) are the disjoint carriers and c_m the sparse coefficient
schedule.  Global carrier disjointness means f(omega) has at most one
nonzero coordinate, so pointwise evaluation and the pointwise norm are
exact, with no truncation error.

The weak integral over a finite interval union E is coordinatewise:

    coefficient at (m, k)  =  c_m * mu(E intersect A(m,k)) / mu(A(m,k)),

every coefficient lying in [0, c_m].  The truncation at the model depth is
evaluated in closed form per level (whole cells inside E count exactly 1,
at most two boundary cells per part need overlap arithmetic), and the tail
beyond the depth carries the certified geometric bound from the coefficient
table, so each integral comes with a sound [lower, upper] norm enclosure.
Assertions downstream always use the lower side.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Mapping

from .blocks import BlockLayout, BlockVector, Functional
from .carriers import CarrierFamily, allocate_carriers
from .errors import (
    DepthMismatchError,
    LayoutMismatchError,
    MaterializationLimitError,
    SupportDepthError,
)
from .intervals import Interval, IntervalSet
from .psi import CoefficientTable, PsiSpec, SequenceRule, coefficients, tail_bound

#: Ratios mu(E n A)/mu(A) beyond 1 by more than this are counted as anomalies.
CLAMP_SLACK = 1e-12


@dataclass(frozen=True)
class PettisModel:
    """Immutable bundle of carriers, coefficient schedule, and block layout."""

    carriers: CarrierFamily
    table: CoefficientTable
    layout: BlockLayout
    psi: PsiSpec
    rule: SequenceRule
    K: float
    p: float
    depth: int

    def levels(self) -> tuple[int, ...]:
        return self.table.levels

    def config_json(self) -> dict:
        return {
            "kind": "pettis",
            "psi": self.psi.to_json(),
            "K": self.K,
            "p": "inf" if math.isinf(self.p) else self.p,
            "rule": self.rule.to_json(),
            "depth": self.depth,
            "carriers": {"scheme": self.carriers.scheme, "params": dict(self.carriers.params)},
        }


def build_model(
    carriers: CarrierFamily | None,
    spec: PsiSpec,
    K: float = 1.0,
    p: float | None = None,
    rule: SequenceRule | None = None,
    depth: int = 24,
) -> PettisModel:
    """Validated model; growth failure and depth mismatches are errors."""
    if rule is None:
        rule = SequenceRule("affine")
    if p is None:
        p = spec.p
    if carriers is None:
        carriers = allocate_carriers(depth)
    if carriers.depth != depth:
        raise DepthMismatchError(
            f"carrier family depth {carriers.depth} != model depth {depth}"
        )
    table = coefficients(spec, K=K, p=p, rule=rule, depth=depth)
    layout = BlockLayout.power_of_two(p, depth)
    return PettisModel(
        carriers=carriers,
        table=table,
        layout=layout,
        psi=spec,
        rule=rule,
        K=K,
        p=p,
        depth=depth,
    )


def evaluate_f(model: PettisModel, omega: float) -> BlockVector:
    """Exact pointwise value; at most one nonzero coordinate.

    Membership is decided against every allocated level, so there is no
    truncation error: omega either sits in exactly one carrier (giving the
    single coordinate c / mu(A)) or in none (giving the zero vector).
    """
    hit = model.carriers.locate(omega)
    if hit is None:
        return BlockVector(model.layout)
    n, k = hit
    c = model.table.coefficient(n)
    if c == 0.0:
        return BlockVector(model.layout)
    return BlockVector(model.layout, {(n, k): c / model.carriers.carrier_measure(n, k)})


# ---------------------------------------------------------------------------
# Integral enclosures
# ---------------------------------------------------------------------------


@dataclass
class _LevelSlab:
    """Sparse description of one level of a truncated integral vector."""

    coeff: float
    full_runs: list[tuple[int, int]] = field(default_factory=list)  # inclusive k ranges
    partial: dict[int, float] = field(default_factory=dict)  # k -> ratio in [0, 1]

    def full_count(self) -> int:
        return sum(b - a + 1 for a, b in self.full_runs)

    def ratio_at(self, k: int) -> float:
        r = self.partial.get(k)
        if r is not None:
            return r
        starts = [a for a, _ in self.full_runs]
        i = bisect_right(starts, k) - 1
        if i >= 0 and self.full_runs[i][0] <= k <= self.full_runs[i][1]:
            return 1.0
        return 0.0


@dataclass(frozen=True)
class IntegralEnclosure:
    """Truncated weak integral with a certified norm enclosure.

    ``lower`` is the exact norm of the truncation; ``upper`` adds the
    geometric tail bound through p-additivity, so

        lower <= true norm <= upper.
    """

    model: PettisModel
    lower: float
    upper: float
    tail: float
    clamp_anomalies: int
    _slabs: Mapping[int, _LevelSlab] = field(repr=False)

    def coefficient(self, n: int, k: int) -> float:
        slab = self._slabs.get(n)
        if slab is None:
            return 0.0
        return slab.coeff * slab.ratio_at(k)

    def apply(self, x: Functional) -> float:
        """Pairing of a finite-support functional with the truncation."""
        if x.layout != self.model.layout:
            raise LayoutMismatchError("functional layout differs from the model layout")
        return math.fsum(w * self.coefficient(n, k) for (n, k), w in x.coeffs.items())

    def to_block_vector(self, max_coords: int = 250_000) -> BlockVector:
        total = sum(s.full_count() + len(s.partial) for s in self._slabs.values())
        if total > max_coords:
            raise MaterializationLimitError(
                f"truncated vector has {total} coordinates; raise max_coords to materialize"
            )
        out: dict[tuple[int, int], float] = {}
        for n, slab in self._slabs.items():
            for a, b in slab.full_runs:
                for k in range(a, b + 1):
                    out[(n, k)] = slab.coeff
            for k, r in slab.partial.items():
                v = slab.coeff * r
                if v:
                    out[(n, k)] = out.get((n, k), 0.0) + v
        return BlockVector(self.model.layout, out)


def _as_interval_set(E: IntervalSet | Interval) -> IntervalSet:
    if isinstance(E, Interval):
        return IntervalSet.of(E)
    return E


def _touched_cells(lo: float, hi: float, level: int) -> tuple[int, int]:
    """1-based indices of the first/last level cells meeting [lo, hi).

    Scaling by 2^level is exact in binary floating point, so no rounding
    guard is needed.
    """
    k_first = math.floor(math.ldexp(lo, level)) + 1
    s_hi = math.ldexp(hi, level)
    f = math.floor(s_hi)
    k_last = f if f == s_hi else f + 1
    return k_first, k_last


def _build_slabs(
    model: PettisModel, E: IntervalSet, max_level: int
) -> tuple[dict[int, _LevelSlab], int]:
    slabs: dict[int, _LevelSlab] = {}
    anomalies = 0
    fam = model.carriers
    for level in model.table.levels:
        if level > max_level:
            break
        c = model.table.coefficient(level)
        slab = _LevelSlab(coeff=c)
        for part in E.parts:
            k_first, k_last = _touched_cells(part.lo, part.hi, level)
            if k_last < k_first:
                continue
            if k_last - k_first >= 2:
                slab.full_runs.append((k_first + 1, k_last - 1))
            for k in {k_first, k_last}:
                mu = fam.carrier_measure(level, k)
                r = fam.overlap(level, k, part.lo, part.hi) / mu
                if r > 1.0:
                    if r > 1.0 + CLAMP_SLACK:
                        anomalies += 1
                    r = 1.0
                elif r < 0.0:
                    if r < -CLAMP_SLACK:
                        anomalies += 1
                    r = 0.0
                if r:
                    slab.partial[k] = min(1.0, slab.partial.get(k, 0.0) + r)
        slab.full_runs.sort()
        if slab.full_runs or slab.partial:
            slabs[level] = slab
    return slabs, anomalies


def pettis_integral(
    model: PettisModel, E: IntervalSet | Interval, truncate_at: int | None = None
) -> IntegralEnclosure:
    """Certified enclosure of the weak integral of f over E.

    ``truncate_at`` restricts the explicit part to levels <= that value
    (default: the model depth); the tail bound moves accordingly, so for
    N1 < N2 the enclosure at N1 contains the truncated norm at N2.
    """
    N = model.depth if truncate_at is None else truncate_at
    if not (0 <= N <= model.depth):
        raise SupportDepthError(f"truncation level {N} outside 0..{model.depth}")
    Eset = _as_interval_set(E)
    slabs, anomalies = _build_slabs(model, Eset, N)
    p = model.p
    tail = tail_bound(model.table, N)
    if math.isinf(p):
        lower = max(
            (s.coeff * max(1.0 if s.full_runs else 0.0, max(s.partial.values(), default=0.0))
             for s in slabs.values()),
            default=0.0,
        )
        upper = max(lower, tail)
    else:
        total = math.fsum(
            s.coeff**p * (s.full_count() + math.fsum(r**p for r in s.partial.values()))
            for s in slabs.values()
        )
        lower = total ** (1.0 / p)
        upper = (total + tail**p) ** (1.0 / p)
    return IntegralEnclosure(
        model=model,
        lower=lower,
        upper=upper,
        tail=tail,
        clamp_anomalies=anomalies,
        _slabs=slabs,
    )


def scalar_integral(model: PettisModel, x: Functional, E: IntervalSet | Interval) -> float:
    """Exact integral of the scalar function (x o f) over E.

    This is the independent oracle for the pairing identity: it works with
    explicitly materialized carrier sets and interval-set intersection,
    sharing no code with the closed-form enclosure path.
    """
    if x.max_level() > model.depth:
        raise SupportDepthError(
            f"functional support reaches level {x.max_level()} beyond depth {model.depth}"
        )
    Eset = _as_interval_set(E)
    total = []
    for (n, k), w in x.coeffs.items():
        c = model.table.coefficient(n)
        if c == 0.0:
            continue
        carrier = model.carriers.carrier(n, k)
        ratio = carrier.intersect(Eset).measure / carrier.measure
        total.append(w * c * ratio)
    return math.fsum(total)


def bochner_level_masses(model: PettisModel, E: IntervalSet | Interval) -> dict[int, float]:
    """Per-level strong-norm mass: c_m * sum_k mu(E n A(m,k)) / mu(A(m,k)).

    Exact because carrier disjointness makes the pointwise norm single-
    coordinate.
    """
    Eset = _as_interval_set(E)
    slabs, _ = _build_slabs(model, Eset, model.depth)
    return {
        n: s.coeff * (s.full_count() + math.fsum(s.partial.values()))
        for n, s in slabs.items()
    }


def bochner_partial(model: PettisModel, E: IntervalSet | Interval, N: int) -> float:
    """Integral of ||f restricted to levels <= N|| over E; nondecreasing in N."""
    if not (0 <= N <= model.depth):
        raise SupportDepthError(f"partial-sum level {N} outside 0..{model.depth}")
    masses = bochner_level_masses(model, E)
    return math.fsum(v for n, v in masses.items() if n <= N)
