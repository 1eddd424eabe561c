"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` or through pytest,
where the lines are also collected into the terminal summary.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from ncqwalk.coins import CoinParams
from ncqwalk.experiment import (
    LoopParams,
    ingest_histogram,
    max_steps,
    multiphoton_probability,
    simulate_histogram,
)
from ncqwalk.momentum import bloch_unitary, dispersion_cos, momentum_evolve_oracle
from ncqwalk.observables import (
    PositionDistribution,
    adaptive_localization,
    localization_parameter,
    position_distribution,
    similarity,
)
from ncqwalk.topology import (
    closed_form_gap,
    closure_lattice,
    dirac_points,
    gap_grid,
    gap_report,
    invariants,
    phase_diagram,
)
from ncqwalk.walk import InitialState, evolve, path_sum_oracle

RESULTS: list[str] = []


def report(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)


def _random_initial(rng) -> InitialState:
    h, v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return InitialState.custom(int(rng.integers(-3, 4)), h, v)


def _random_params(rng) -> CoinParams:
    t, p = rng.uniform(-math.pi, math.pi, 2)
    return CoinParams(t, p)


def _max_dev(a, b) -> float:
    lo = min(a.offset, b.offset)
    hi = max(a.offset + len(a.amplitudes), b.offset + len(b.amplitudes))
    pa = np.zeros((hi - lo, 2), complex)
    pb = np.zeros((hi - lo, 2), complex)
    pa[a.offset - lo:a.offset - lo + len(a.amplitudes)] = a.amplitudes
    pb[b.offset - lo:b.offset - lo + len(b.amplitudes)] = b.amplitudes
    return float(np.max(np.abs(pa - pb)))


def test_criterion_01_oracle_triangle():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    dev_path = dev_mom = 0.0
    for _ in range(200):
        init, params = _random_initial(rng), _random_params(rng)
        n = int(rng.integers(1, 11))
        dev_path = max(dev_path, _max_dev(evolve(init, params, n), path_sum_oracle(init, params, n)))
        n = int(rng.integers(1, 51))
        dev_mom = max(dev_mom, _max_dev(evolve(init, params, n),
                                        momentum_evolve_oracle(init, params, n)))
    elapsed = time.perf_counter() - t0
    ok = dev_path <= 1e-12 and dev_mom <= 1e-8 and elapsed < 30
    report(1, ok, f"path-sum dev {dev_path:.2e} (<=1e-12), momentum dev {dev_mom:.2e} "
                  f"(<=1e-8), {elapsed:.1f} s (<30 s)")
    assert ok


def test_criterion_02_dispersion_identity():
    rng = np.random.default_rng(202)
    worst = 0.0
    for k, t, p in rng.uniform(-math.pi, math.pi, (10_000, 3)):
        params = CoinParams(t, p)
        lam = np.linalg.eigvals(bloch_unitary(k, params))
        expected = math.cos(k) * math.cos(t) * math.cos(p) + math.sin(k) * math.sin(t) * math.sin(p)
        worst = max(worst, float(np.max(np.abs(np.cos(np.angle(lam)) - expected))))
    # phi = 0 reduces to cos E = cos k cos theta
    ks = rng.uniform(-math.pi, math.pi, 1000)
    ts = rng.uniform(-math.pi, math.pi, 1000)
    special = max(abs(dispersion_cos(k, CoinParams(t, 0.0)) - math.cos(k) * math.cos(t))
                  for k, t in zip(ks, ts))
    ok = worst <= 1e-10 and special <= 1e-15
    report(2, ok, f"eigenphase dev {worst:.2e} (<=1e-10), phi=0 dev {special:.1e}")
    assert ok


def test_criterion_03_valley_dirac_points():
    worst_gap = 0.0
    worst_k = 0.0
    h = math.pi / 2
    for t in (h, -h):
        for p in (h, -h):
            rep = gap_report(CoinParams(t, p))
            k_expected = math.copysign(h, t * p)
            worst_gap = max(worst_gap, rep.gap_zero)
            worst_k = max(worst_k, abs(rep.k_at_gap_zero - k_expected))
    found = {(d.theta, d.phi) for d in dirac_points()}
    lattice = closure_lattice()
    matched = all(any(math.hypot(a - x, b - y) <= 1e-5 for x, y in found) for a, b in lattice)
    extra = [f for f in found if not any(math.hypot(f[0] - a, f[1] - b) <= 1e-5 for a, b in lattice)]
    ok = worst_gap < 1e-7 and worst_k < 1e-6 and matched and not extra
    report(3, ok, f"gap {worst_gap:.1e} (<1e-7), k off by {worst_k:.1e}, "
                  f"{len(found)} closures vs {len(lattice)} lattice points, {len(extra)} extra")
    assert ok


def _brute_gap(t: float, p: float) -> float:
    """Direct eigenphase minimization, independent of the band-structure code."""
    def e_abs(k, target):
        lam = np.linalg.eigvals(bloch_unitary(k, CoinParams(t, p)))
        e = float(np.max(np.abs(np.angle(lam))))
        return abs(e - target)

    ks = np.linspace(-math.pi, math.pi, 721)
    vals = [e_abs(k, 0.0) for k in ks]
    j = int(np.argmin(vals))
    res = minimize_scalar(e_abs, bounds=(ks[j] - 0.01, ks[j] + 0.01), args=(0.0,),
                          method="bounded", options={"xatol": 1e-12})
    return min(vals[j], float(res.fun))


def test_criterion_04_closed_form_gap():
    rng = np.random.default_rng(404)
    t0 = time.perf_counter()
    validate = max(abs(_brute_gap(t, p) - float(closed_form_gap(t, p)))
                   for t, p in rng.uniform(-math.pi, math.pi, (50, 2)))
    axis = np.linspace(-math.pi, math.pi, 101)
    th, ph = np.meshgrid(axis, axis, indexing="ij")
    g0, gpi, _, _ = gap_grid(th, ph)
    ref = closed_form_gap(th, ph)
    worst = float(max(np.max(np.abs(g0 - ref)), np.max(np.abs(gpi - ref))))
    elapsed = time.perf_counter() - t0
    ok = validate < 1e-6 and worst <= 1e-8 and elapsed < 60
    report(4, ok, f"closed form vs brute force {validate:.1e}, grid dev {worst:.2e} "
                  f"(<=1e-8), {elapsed:.1f} s (<60 s)")
    assert ok


def test_criterion_05_bound_state_signature():
    init = InitialState.plus()
    s = {}
    for label, phi in (("0", 0.0), ("pi/4", math.pi / 4), ("3pi/4", 3 * math.pi / 4), ("pi", math.pi)):
        dist = position_distribution(evolve(init, CoinParams(-math.pi / 4, phi), 7))
        s[label] = localization_parameter(dist).s_l
    ok = s["pi/4"] < 0 and s["3pi/4"] < 0 and s["0"] > 0 and s["pi"] > 0
    detail = ", ".join(f"S_L({k})={v:+.6f}" for k, v in s.items())
    report(5, ok, detail + ("" if ok else "  (sign pattern not produced by this model)"))
    assert ok


def test_criterion_06_extreme_states():
    init = InitialState.plus()
    bounce = position_distribution(evolve(init, CoinParams(0.0, math.pi / 2), 7))
    p_inner = bounce.at(1) + bounce.at(-1)
    s_bounce = localization_parameter(bounce).s_l
    ok_bounce = abs(p_inner - 1.0) <= 1e-12 and abs(s_bounce + 0.5) <= 1e-12

    ok_ball = True
    notes = []
    for theta in (math.pi, -math.pi):
        ball = position_distribution(evolve(init, CoinParams(theta, math.pi), 7))
        p_outer = ball.at(7) + ball.at(-7)
        s_adapt = adaptive_localization(ball).s_l
        s_fixed = localization_parameter(ball).s_l
        ok_ball &= abs(p_outer - 1.0) <= 1e-12 and abs(s_adapt - 0.5) <= 1e-12
        notes.append(f"theta={theta:+.4f}: P(|x|=7)={p_outer:.12f} adaptive S_L={s_adapt:+.12f} "
                     f"fixed(5,1) S_L={s_fixed:+.1e}")
    ok = ok_bounce and ok_ball
    report(6, ok, f"bounce P(|x|=1)={p_inner:.12f} S_L={s_bounce:+.12f}; " + "; ".join(notes)
           + " [fixed indices cannot see mass at |x|=7]")
    assert ok


def test_criterion_07_similarity():
    rng = np.random.default_rng(707)
    worst_self = worst_sym = 0.0
    in_range = True
    for _ in range(10_000):
        n = int(rng.integers(1, 30))
        a = PositionDistribution(int(rng.integers(-5, 5)), rng.dirichlet(np.ones(n)))
        b = PositionDistribution(int(rng.integers(-5, 5)), rng.dirichlet(np.ones(n)))
        worst_self = max(worst_self, abs(similarity(a, a) - 1.0))
        s_ab, s_ba = similarity(a, b), similarity(b, a)
        worst_sym = max(worst_sym, abs(s_ab - s_ba))
        in_range &= 0.0 <= s_ab <= 1.0
    t0 = time.perf_counter()
    loop, params, init = LoopParams(), CoinParams(math.pi / 4, 0.0), InitialState.plus()
    hist = simulate_histogram(loop, params, init, 10**9, max_steps(loop), seed=0, noise=False)
    recovered = ingest_histogram(hist, loop, 7, 10.0)
    s_trip = similarity(recovered, position_distribution(evolve(init, params, 7)))
    elapsed = time.perf_counter() - t0
    ok = worst_self <= 1e-12 and worst_sym <= 1e-12 and in_range and s_trip >= 0.99 and elapsed < 10
    report(7, ok, f"|S(p,p)-1|<={worst_self:.1e}, asym<={worst_sym:.1e}, in [0,1]: {in_range}; "
                  f"round trip S={s_trip:.6f} (>=0.99) in {elapsed:.2f} s")
    assert ok


def test_criterion_08_experiment_constants():
    loop = LoopParams()
    n_max = max_steps(loop)
    fits = n_max * loop.time_bin_distance <= loop.round_trip_time
    pmulti = multiphoton_probability(0.003)
    ok = n_max == 12 and fits and pmulti < 4.5e-6
    report(8, ok, f"N_max={n_max}, {n_max}*{loop.time_bin_distance:g} ns <= "
                  f"{loop.round_trip_time:g} ns: {fits}, P(n>=2)={pmulti:.4e} (<4.5e-6)")
    assert ok


def _lattice_distance(t: float, p: float) -> float:
    return min(math.hypot(t - a, p - b) for a, b in closure_lattice())


def test_criterion_09_invariant_stability():
    rng = np.random.default_rng(909)
    changed = 0
    tested = 0
    while tested < 100:
        target = _random_params(rng)
        base = invariants(target, 1000)
        if base.boundary_flag:
            continue
        fine = invariants(target, 2000)
        changed += (base.q_zero, base.q_pi) != (fine.q_zero, fine.q_pi)
        tested += 1
    diagram = phase_diagram(101)
    flagged = np.argwhere(diagram.boundary)
    far = max(_lattice_distance(diagram.theta_grid[i], diagram.phi_grid[j]) for i, j in flagged)
    ok = changed == 0 and far <= 1e-5
    report(9, ok, f"{changed}/100 targets changed under doubling; {len(flagged)} boundary cells, "
                  f"max distance to lattice {far:.1e} (<=1e-5)")
    assert ok


def test_criterion_10_conservation():
    rng = np.random.default_rng(1010)
    worst = 0.0
    for _ in range(100):
        init, params = _random_initial(rng), _random_params(rng)
        worst = max(worst, abs(evolve(init, params, 100).norm() - 1.0))
    ok = worst <= 1e-10
    report(10, ok, f"max norm drift after 100 steps {worst:.2e} (<=1e-10)")
    assert ok


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
    raise SystemExit(1 if failed else 0)
