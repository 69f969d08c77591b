"""Carrier families: closed forms vs a literal simulation, disjointness, schemes."""

import math
import random

import pytest

from pettis_forge import CarrierFamily, IntervalSet, allocate_carriers, verify_disjointness
from pettis_forge.carriers import GREEDY_GAP, STRATIFIED
from pettis_forge.errors import CarrierIndexError, ConfigError, MaterializationLimitError
from pettis_forge.intervals import Interval


def simulate_greedy(depth: int) -> dict:
    """Independent oracle: literal middle-half-of-largest-gap allocation,
    deepest level first, cells left to right, real interval arithmetic."""
    occupied = IntervalSet()
    sets = {}
    for n in range(depth, 0, -1):
        for k in range(1, (1 << n) + 1):
            cell = IntervalSet.of(Interval(math.ldexp(k - 1, -n), math.ldexp(k, -n)))
            free = cell.difference(occupied)
            assert not free.is_empty(), f"free region vanished at {(n, k)}"
            best = max(free.parts, key=lambda p: (p.measure, -p.lo))
            length = best.measure
            chunk = IntervalSet.of(Interval(best.lo + length / 4, best.lo + 3 * length / 4))
            sets[(n, k)] = chunk
            occupied = occupied.union(chunk)
    return sets


@pytest.mark.parametrize("depth", range(1, 9))
def test_greedy_closed_form_matches_simulation(depth):
    oracle = simulate_greedy(depth)
    fam = allocate_carriers(depth)
    for (n, k), want in oracle.items():
        assert fam.carrier(n, k) == want, (depth, n, k)
        assert fam.carrier_measure(n, k) == want.measure


def test_depth_one_worked_values():
    fam = allocate_carriers(1)
    assert fam.carrier(1, 1) == IntervalSet.of(Interval(0.125, 0.375))
    assert fam.carrier(1, 2) == IntervalSet.of(Interval(0.625, 0.875))


def test_carrier_index_errors():
    fam = allocate_carriers(1)
    assert fam.carrier(1, 1).measure > 0
    with pytest.raises(CarrierIndexError):
        fam.carrier(1, 3)
    with pytest.raises(CarrierIndexError):
        fam.carrier(2, 1)


def test_zero_depth_rejected():
    with pytest.raises(ConfigError):
        allocate_carriers(0)
    with pytest.raises(ConfigError):
        allocate_carriers(3, "no-such-scheme")


@pytest.mark.parametrize("scheme,depth", [(GREEDY_GAP, 10), (STRATIFIED, 10), (GREEDY_GAP, 1)])
def test_disjointness_full_sweep(scheme, depth):
    report = verify_disjointness(allocate_carriers(depth, scheme))
    assert report.passed and not report.violations
    assert report.mode == "full-sweep"


def test_disjointness_catches_corruption():
    fam = allocate_carriers(2)
    sets = {cell: fam.carrier(*cell) for cell in fam.cells()}
    sets[(1, 1)] = sets[(1, 1)].union(sets[(2, 1)])
    bad = CarrierFamily.from_sets(2, sets)
    report = verify_disjointness(bad)
    assert not report.passed
    overlap = next(v for v in report.violations if v[0] == "overlap")
    assert {overlap[1], overlap[2]} == {(1, 1), (2, 1)}


def test_structural_mode_at_depth_24():
    report = verify_disjointness(allocate_carriers(24))
    assert report.passed and not report.violations
    assert report.mode == "structural+windows"


def test_structural_check_agrees_with_full_sweep():
    # both verification paths reach the same verdict on a mid-size family
    from pettis_forge.carriers import _structural_greedy, _windowed_sweep

    fam = allocate_carriers(12)
    assert verify_disjointness(fam).passed  # full sweep (131070 parts)
    violations = []
    pairs = _structural_greedy(fam, violations)
    assert pairs == 12 * 11 // 2 and not violations
    _windowed_sweep(fam, violations, window_samples=256)
    assert not violations


@pytest.mark.parametrize("scheme", [GREEDY_GAP, STRATIFIED])
def test_occupied_measure_below_one(scheme):
    for depth in (1, 3, 6):
        fam = allocate_carriers(depth, scheme)
        occ = fam.occupied()
        assert occ.measure < 1.0
        total = math.fsum(
            fam.carrier_measure(n, k) for n, k in fam.cells()
        )
        assert abs(total - occ.measure) < 1e-12  # disjointness makes these equal


def test_level_mass_stays_below_one_per_prefix():
    fam = allocate_carriers(12)
    acc = 0.0
    for n in range(1, 13):
        acc += math.fsum(fam.carrier_measure(n, k) for k in range(1, (1 << n) + 1))
        assert acc < 1.0


def test_determinism_bit_identical():
    a = allocate_carriers(7)
    b = allocate_carriers(7)
    for cell in a.cells():
        assert a.carrier(*cell) == b.carrier(*cell)


@pytest.mark.parametrize("scheme", [GREEDY_GAP, STRATIFIED])
def test_locate_agrees_with_explicit_membership(scheme):
    fam = allocate_carriers(6, scheme)
    explicit = {cell: fam.carrier(*cell) for cell in fam.cells()}
    rng = random.Random(99)
    points = [rng.random() for _ in range(2000)]
    points += [0.0, 0.5, 0.2, 0.125, 0.375 - 2**-50]
    for omega in points:
        hits = [cell for cell, s in explicit.items() if s.contains(omega)]
        assert len(hits) <= 1  # global disjointness, point form
        got = fam.locate(omega)
        assert got == (hits[0] if hits else None), omega


@pytest.mark.parametrize("scheme", [GREEDY_GAP, STRATIFIED])
def test_overlap_agrees_with_explicit_clip(scheme):
    fam = allocate_carriers(6, scheme)
    rng = random.Random(5)
    for _ in range(500):
        a, b = rng.random(), rng.random()
        lo, hi = min(a, b), max(a, b)
        n = rng.randint(1, 6)
        k = rng.randint(1, 1 << n)
        want = fam.carrier(n, k).clip(lo, hi).measure
        got = fam.overlap(n, k, lo, hi)
        assert abs(got - want) < 1e-15, (scheme, n, k, lo, hi)


def test_stratified_measures_and_porosity():
    depth = 8
    fam = allocate_carriers(depth, STRATIFIED)
    for n in (1, 3, 8):
        assert fam.carrier_measure(n, 1) == math.ldexp(1.0, -2 * n)
    # no carrier contains a complete dyadic cell of any level <= depth
    for n in (1, 2, 3):
        s = fam.carrier(n, 1)
        for m in range(n, depth + 1):
            w = math.ldexp(1.0, -m)
            for j in range(1 << (m - n)):
                inside = s.clip(j * w, (j + 1) * w).measure
                assert inside < w  # strictly porous
    # every finest cell keeps free room: its relative slice [0, 2^-depth)
    # is never taken, i.e. absolute points below 2^-2*depth are free
    assert fam.locate(0.0) is None
    assert fam.locate(math.ldexp(0.5, -2 * depth)) is None


def test_stratified_depth_cap():
    with pytest.raises(ConfigError):
        allocate_carriers(27, STRATIFIED)


def test_materialization_guards():
    fam = allocate_carriers(24)
    with pytest.raises(MaterializationLimitError):
        fam.occupied()
    strat = allocate_carriers(26, STRATIFIED)
    with pytest.raises(MaterializationLimitError):
        strat.carrier(1, 1)


def test_serialization_round_trip_small():
    fam = allocate_carriers(4)
    blob = fam.to_json()
    assert blob["scheme"] == GREEDY_GAP
    back = CarrierFamily.from_json(blob)
    for cell in fam.cells():
        assert back.carrier(*cell) == fam.carrier(*cell)
    assert verify_disjointness(back).passed


def test_serialization_elides_large_sets():
    fam = allocate_carriers(24)
    blob = fam.to_json()
    assert blob.get("sets_elided") is True
    back = CarrierFamily.from_json(blob)
    assert back.scheme == GREEDY_GAP
    assert back.carrier(5, 17) == fam.carrier(5, 17)
