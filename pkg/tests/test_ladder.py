import math

import numpy as np
import pytest

from ladderkit.errors import InvalidOrder, InvalidSpec, NoPassband, SingularNetwork
from ladderkit.ladder import (
    LadderBase, LadderTopology, Orientation, Stage, _Objective, optimize_c0, shunt_fs_for, sweep, synthesize,
)
from ladderkit.mbvd import TWO_PI, MbvdParams, admittance, resonance_frequencies
from ladderkit.metrics import filter_metrics
from ladderkit.traces import FrequencyGrid

S, P = Orientation.SERIES, Orientation.SHUNT
MATCHED_C0 = 1 / (TWO_PI * 22e9 * 50)  # |1/(w C0)| = 50 ohm at 22 GHz


def test_synthesize_overlap_reference():
    t = synthesize(22e9, 0.42, 50, 100e-15, 120e-15)
    assert t.orientations == [S, P, S]
    shunt_fs, shunt_fp = resonance_frequencies(t.stages[1].resonator)
    series_fs, _ = resonance_frequencies(t.stages[0].resonator)
    # 22 GHz / sqrt(1 + 8*0.42/pi^2) = 22 / 1.157773370 GHz
    assert shunt_fs == pytest.approx(19.0019917229457891e9, rel=1e-12)
    assert shunt_fp == pytest.approx(22e9, rel=1e-12)
    assert series_fs == pytest.approx(22e9, rel=1e-12)
    assert t.stages[0].resonator is t.stages[2].resonator


def test_synthesize_variants():
    assert synthesize(22e9, 0.42, 50, 1e-13, 1e-13, order=3, first="shunt").orientations == [P, S, P]
    assert synthesize(22e9, 0.42, 50, 1e-13, 1e-13, order=2).orientations == [S, P]
    assert synthesize(22e9, 0.42, 50, 1e-13, 1e-13, order=5).orientations == [S, P, S, P, S]
    assert synthesize(22e9, 0.42, 50, 1e-13, 1e-13, order=4, first=P).orientations == [P, S, P, S]


def test_zero_coupling_limit():
    assert shunt_fs_for(22e9, 1e-12) == pytest.approx(22e9, rel=1e-11)


@pytest.mark.parametrize("order", [0, 1, -3, 2.5, True])
def test_invalid_order(order):
    with pytest.raises(InvalidOrder):
        synthesize(22e9, 0.42, 50, 1e-13, 1e-13, order=order)


def test_invalid_resonator_inputs():
    with pytest.raises(InvalidSpec):
        synthesize(22e9, 0.0, 50, 1e-13, 1e-13)
    with pytest.raises(InvalidSpec):
        synthesize(22e9, 0.42, 50, -1e-13, 1e-13)


def test_topology_invariants():
    r = MbvdParams(c0=1e-13, rm=1, lm=1e-9, cm=1e-14)
    with pytest.raises(InvalidOrder):
        LadderTopology(())
    with pytest.raises(InvalidOrder):
        LadderTopology((Stage(S, r), Stage(S, r)))
    assert LadderTopology((Stage(S, r),)).order == 1


def test_series_resonator_at_fs_passes():
    r = MbvdParams(c0=1e-13, rm=0.0, lm=1e-9, cm=1e-14)
    fs, _ = resonance_frequencies(r)
    out = sweep(LadderTopology((Stage(S, r),)), np.array([fs]))
    assert abs(out["S21"][0]) == pytest.approx(1.0, abs=1e-6)


def test_shunt_resonator_at_fs_shorts():
    r = MbvdParams(c0=1e-13, rm=0.0, lm=1e-9, cm=1e-14)
    fs, _ = resonance_frequencies(r)
    out = sweep(LadderTopology((Stage(P, r),)), np.array([fs]))
    assert abs(out["S21"][0]) < 1e-6


def test_t_network_against_impedance_matrix():
    """Independent route for series-shunt-series: Z matrix of a T, then S = (Z - Z0)(Z + Z0)^-1."""
    t = synthesize(22e9, 0.42, 50, 90e-15, 130e-15, rs=1.5, ls=20e-12)
    f = np.linspace(12e9, 32e9, 301)
    out = sweep(t, f, 50.0)
    z1 = 1 / admittance(t.stages[0].resonator, f)
    z2 = 1 / admittance(t.stages[1].resonator, f)
    z3 = 1 / admittance(t.stages[2].resonator, f)
    for k in range(f.size):
        z = np.array([[z1[k] + z2[k], z2[k]], [z2[k], z3[k] + z2[k]]])
        s = (z - 50 * np.eye(2)) @ np.linalg.inv(z + 50 * np.eye(2))
        np.testing.assert_allclose([out["S11"][k], out["S21"][k], out["S12"][k], out["S22"][k]],
                                   [s[0, 0], s[1, 0], s[0, 1], s[1, 1]], rtol=1e-9, atol=1e-12)


def test_singular_point_reports_frequency():
    # rm = 0 and w*lm == 1/(w*cm) exactly at f = 1/(2 pi): the motional branch is a short
    r = MbvdParams(c0=1.0, rm=0.0, lm=1.0, cm=1.0)
    f = np.array([0.1, 1 / TWO_PI, 0.3])
    with pytest.raises(SingularNetwork) as info:
        sweep(LadderTopology((Stage(P, r),)), f)
    assert info.value.frequency == f[1]


def _random_ladder(rng, lossless=False):
    k2 = rng.uniform(0.05, 0.6)
    q = 10 ** rng.uniform(1, 3.5)
    c0s, c0p = 10 ** rng.uniform(-14, -12.3, size=2)
    t = synthesize(rng.uniform(1e9, 40e9), k2, q, c0s, c0p, order=int(rng.integers(2, 7)),
                   rs=0.0 if lossless else rng.uniform(0, 3), ls=rng.uniform(0, 50e-12),
                   first=S if rng.random() < 0.5 else P)
    if lossless:
        t = LadderTopology(tuple(Stage(s.orientation, s.resonator.replace(rm=0.0)) for s in t.stages))
    return t


def test_random_ladders_reciprocal_and_passive(rng):
    for _ in range(50):
        t = _random_ladder(rng)
        fs = resonance_frequencies(t.stages[0].resonator)[0]
        out = sweep(t, FrequencyGrid.around(fs, 0.5, 1.5, 501))
        s21, s12 = out["S21"], out["S12"]
        np.testing.assert_allclose(s12, s21, rtol=1e-12, atol=1e-15)
        assert np.all(np.abs(out["S11"]) ** 2 + np.abs(s21) ** 2 <= 1 + 1e-9)


def test_lossless_ladders_conserve_energy(rng):
    for _ in range(50):
        t = _random_ladder(rng, lossless=True)
        fs = resonance_frequencies(t.stages[0].resonator)[0]
        out = sweep(t, FrequencyGrid.around(fs, 0.5, 1.5, 500))
        power = np.abs(out["S11"]) ** 2 + np.abs(out["S21"]) ** 2
        np.testing.assert_allclose(power, 1.0, atol=1e-9)


def test_synthesis_overlap_property(rng):
    for _ in range(200):
        fs = 10 ** rng.uniform(8, 11)
        t = synthesize(fs, rng.uniform(1e-3, 0.95), 10 ** rng.uniform(0, 4), 1e-13, 1e-13, order=int(rng.integers(2, 8)))
        series = next(s.resonator for s in t.stages if s.orientation is S)
        shunt = next(s.resonator for s in t.stages if s.orientation is P)
        assert resonance_frequencies(shunt)[1] == pytest.approx(resonance_frequencies(series)[0], rel=1e-12)


def _bump_rm(t, i, factor):
    stages = list(t.stages)
    r = stages[i].resonator
    stages[i] = Stage(stages[i].orientation, r.replace(rm=r.rm * factor))
    return LadderTopology(tuple(stages))


def test_monotone_loss_for_strongly_coupled_matched_ladders(rng):
    grid = FrequencyGrid.around(22e9, 0.6, 1.4, 1001)
    for _ in range(300):
        ratio = 10 ** rng.uniform(-0.3, 0.3)
        t = synthesize(22e9, rng.uniform(0.3, 0.6), 10 ** rng.uniform(math.log10(50), 3),
                       MATCHED_C0 * ratio * 10 ** rng.uniform(-0.2, 0.2),
                       MATCHED_C0 / ratio * 10 ** rng.uniform(-0.2, 0.2), order=int(rng.integers(2, 6)))
        before = sweep(t, grid)
        m = filter_metrics(before)
        after = sweep(_bump_rm(t, int(rng.integers(t.order)), rng.uniform(1.01, 3)), grid)
        band = (before.frequencies >= m.f_lo) & (before.frequencies <= m.f_hi)
        assert np.all(np.abs(after["S21"][band]) <= np.abs(before["S21"][band]) + 1e-12)


def test_extra_loss_can_raise_transmission_at_a_notch():
    """Damping the shunt notch of a weakly matched, low-Q ladder lifts |S21| inside its wide 3-dB band."""
    t = synthesize(22e9, 0.37, 12.2, 208.5e-15, 35.2e-15, order=2)
    grid = FrequencyGrid.around(22e9, 0.6, 1.4, 1001)
    before = sweep(t, grid)
    m = filter_metrics(before)
    after = sweep(_bump_rm(t, 1, 2.0), grid)
    band = (before.frequencies >= m.f_lo) & (before.frequencies <= m.f_hi)
    assert np.max(np.abs(after["S21"][band]) - np.abs(before["S21"][band])) > 0.01


def test_sweep_performance_budget():
    import time

    t = synthesize(22e9, 0.42, 50, 1e-13, 1e-13)
    grid = FrequencyGrid.around(22e9, 0.6, 1.4, 10_001)
    sweep(t, grid)
    start = time.perf_counter()
    sweep(t, grid)
    assert time.perf_counter() - start < 0.1


BASE = LadderBase(22e9, 0.42, 50)
GRID = FrequencyGrid.around(22e9)
RANGE = (10e-15, 500e-15)


@pytest.fixture(scope="module")
def acceptance_result():
    return optimize_c0(BASE, RANGE, RANGE, GRID)


def test_optimum_not_worse_than_any_coarse_point(acceptance_result):
    objective = _Objective(BASE, GRID.frequencies(), 50.0, 10.0, 0.5)
    coarse = np.geomspace(*RANGE, 16)
    values = [objective(a, b) for a in coarse for b in coarse]
    assert acceptance_result.objective <= min(values)
    assert acceptance_result.coarse_best == pytest.approx(min(values), rel=1e-12)
    assert acceptance_result.objective == pytest.approx(acceptance_result.metrics.il_db
                                                        + 10 * max(0, 10 - acceptance_result.metrics.rejection_db))


def test_optimisation_is_deterministic(acceptance_result):
    again = optimize_c0(BASE, RANGE, RANGE, GRID)
    assert (again.c0_series, again.c0_shunt, again.objective) == (
        acceptance_result.c0_series, acceptance_result.c0_shunt, acceptance_result.objective)


def test_degenerate_ranges_return_the_point():
    res = optimize_c0(BASE, (1e-13, 1e-13), (1.2e-13, 1.2e-13), GRID)
    assert (res.c0_series, res.c0_shunt) == pytest.approx((1e-13, 1.2e-13), rel=1e-12)
    direct = filter_metrics(sweep(BASE.build(1e-13, 1.2e-13), GRID))
    assert res.metrics.il_db == pytest.approx(direct.il_db, rel=1e-12)
    assert res.metrics.fc == pytest.approx(direct.fc, rel=1e-12)


def test_one_fixed_capacitance():
    res = optimize_c0(BASE, (1e-13, 1e-13), RANGE, GRID)
    assert res.c0_series == pytest.approx(1e-13, rel=1e-12)
    assert RANGE[0] <= res.c0_shunt <= RANGE[1]


def test_unconstrained_objective_runs_to_the_through_corner():
    res = optimize_c0(BASE, RANGE, RANGE, GRID, min_rejection_db=None)
    assert res.c0_series == pytest.approx(RANGE[1], rel=1e-3)
    assert res.c0_shunt == pytest.approx(RANGE[0], rel=1e-3)
    assert res.metrics.rejection_db < 1.0


def test_no_passband_anywhere():
    with pytest.raises(NoPassband):
        optimize_c0(BASE, RANGE, RANGE, FrequencyGrid(1e9, 2e9, 101), coarse_points=4)


def test_bad_ranges():
    with pytest.raises(InvalidSpec):
        optimize_c0(BASE, (2e-13, 1e-13), RANGE, GRID)
    with pytest.raises(InvalidSpec):
        optimize_c0(BASE, (0, 1e-13), RANGE, GRID)
    with pytest.raises(InvalidSpec):
        optimize_c0(LadderBase(22e9, 1.5, 50), RANGE, RANGE, GRID)


@pytest.mark.slow
def test_dense_grid_oracle_agrees(acceptance_result):
    """Brute force over a 200 x 200 logarithmic grid of capacitance pairs."""
    objective = _Objective(BASE, GRID.frequencies(), 50.0, 10.0, 0.5)
    axis = np.geomspace(*RANGE, 200)
    best = min(objective(a, b) for a in axis for b in axis)
    assert abs(best - acceptance_result.objective) <= 0.05
