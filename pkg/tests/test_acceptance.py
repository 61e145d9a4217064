"""Acceptance suite: one test per headline requirement.

Each test prints a single ``PASS``/``FAIL`` line (visible even when pytest
captures output) and then asserts on the same condition.
"""

import hashlib
import math
import time
from pathlib import Path

import numpy as np
import pytest

from disent.channels import ChannelKind, ChannelSpec, DecaySchedule, apply_joint, evolve_o, evolve_x
from disent.concurrence import MatrixType, classify, concurrence_x, q_phi, wootters
from disent.critical import (
    CDPhase, SliceParams, TDPhase, ad_cd_time_symmetric, ad_phi_bounds, ad_phi_cd_free,
    ad_phi_cd_tol, ad_psi_cd_free, critical_set, pd_cd_time, slice_state,
)
from disent.density import decompose, embed, random_density, random_x_state, werner_state
from disent.oracle import cd_free_scan, lower_bound_audit, onset_time
from disent.sweep import PRESETS, preset_config, run_sweep
from disent.verify import SLICE_KINDS, check_boundary_consistency, check_oracle_boundaries, random_slice
from disent.witness import Family, cd_pair, region_pair

SEED = 20240611
SNAPSHOTS = Path(__file__).parent / "snapshots"


@pytest.fixture
def report(capsys):
    def _report(name: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}")
        assert ok, detail
    return _report


def test_closed_form_evolution_matches_kraus(report):
    rng = np.random.default_rng(SEED)
    kinds = list(ChannelKind)
    start, worst = time.perf_counter(), 0.0
    for i in range(1000):
        rho = random_density(rng, rank=int(rng.integers(1, 5)))
        x, o = decompose(rho)
        spec = ChannelSpec(kinds[i % 3], rng.uniform(), rng.uniform())
        xk, ok = decompose(apply_joint(rho, spec))
        err_x = np.max(np.abs(evolve_x(x, spec).matrix() - xk.matrix()))
        err_o = np.max(np.abs(evolve_o(o, spec).matrix() - ok.matrix()))
        worst = max(worst, float(err_x), float(err_o))
    elapsed = time.perf_counter() - start
    report("closed-form evolution", worst <= 1e-12 and elapsed < 5,
           f"max |diff| {worst:.2e} (tol 1e-12), {elapsed:.2f} s (limit 5 s)")


def test_concurrence_oracle_agreement(report):
    rng = np.random.default_rng(SEED)
    worst_x = max(abs(concurrence_x(x) - wootters(embed(x)))
                  for x in (random_x_state(rng, "Phi" if i % 2 else "Psi") for i in range(1000)))
    worst_w = max(abs(wootters(embed(werner_state(w))) - max(0.0, (3 * w - 1) / 2))
                  for w in np.linspace(0, 1, 101))
    report("concurrence agreement", worst_x <= 1e-10 and worst_w <= 1e-12,
           f"X states {worst_x:.2e} (tol 1e-10), Werner {worst_w:.2e} (tol 1e-12)")


def test_boundary_self_consistency(report):
    chk = check_boundary_consistency(200, SEED)
    report("boundary self-consistency", chk.passed and chk.n > 0,
           f"{chk.n} boundaries over 200 slices x {len(SLICE_KINDS)} kinds, "
           f"max |Q(tau) - target| {chk.max_err:.2e} (tol 1e-9)")


def test_analytic_boundaries_match_bisection(report):
    # replay the slice draws of the check to count gamma_a = 5 gamma_b samples
    rng = np.random.default_rng(SEED)
    drawn = [random_slice(rng, ch, mt) for ch, mt in SLICE_KINDS for _ in range(200)]
    asym = sum(sl.p_a != sl.p_b for sl in drawn)
    start = time.perf_counter()
    chk = check_oracle_boundaries(200, SEED)
    elapsed = time.perf_counter() - start
    report("analytic vs bisection", chk.passed and chk.n > 0 and asym > 0 and elapsed < 60,
           f"{chk.n} boundaries, max diff {chk.max_err:.2e} (tol 1e-6), "
           f"{asym}/{len(drawn)} slices with asymmetric rates, {elapsed:.1f} s (limit 60 s)")


def test_amplitude_identities(report):
    rng = np.random.default_rng(SEED)
    worst_phi = 0.0
    for _ in range(500):
        d22, d33 = rng.uniform(0, 0.25, 2)
        qmax = 1 - d22 - d33 - 2 * math.sqrt(d22 * d33)
        q = rng.uniform(0, qmax)
        worst_phi = max(worst_phi, abs(ad_phi_cd_tol(q, d22, d33, 1.0, 1.0) - ad_phi_cd_free(q, d22, d33)))
    # same identity for Psi, on the trace-consistent slice
    worst_psi, n_psi = 0.0, 0
    for _ in range(500):
        d11 = rng.uniform(0.01, 0.4)
        q = rng.uniform(0, 1 - d11)
        cs = critical_set(SliceParams("amplitude", "Psi", q, 1.0, 1.0, d11=d11))
        if math.isfinite(cs.cd_tol):
            worst_psi = max(worst_psi, abs(cs.cd_tol - ad_psi_cd_free(q, d11)))
            n_psi += 1
    # C_tv -> 0 puts every TD boundary on the CD boundary
    worst_shift = 0.0
    for ch, mt in SLICE_KINDS:
        for _ in range(50):
            sl = random_slice(rng, ch, mt)
            for c_tv in (0.0, 1e-300):
                cs = critical_set(sl.with_target(c_tv))
                worst_shift = max(worst_shift, abs(cs.td_tol - cs.cd_tol) if cs.td_tol != cs.cd_tol else 0.0)
                worst_shift = max(worst_shift, float(cs.td_intervals != cs.cd_intervals))
    ok = worst_phi <= 1e-12 and worst_psi <= 1e-12 and n_psi > 0 and worst_shift <= 1e-12
    report("amplitude identities", ok,
           f"Phi full-damping {worst_phi:.2e}, Psi full-damping {worst_psi:.2e} ({n_psi} slices), "
           f"zero-threshold collapse {worst_shift:.2e} (tol 1e-12)")


def test_cd_free_certification(report):
    rng = np.random.default_rng(SEED)
    done = failures = 0
    while done < 50:
        d22, d33 = rng.uniform(0, 0.2, 2)
        q = rng.uniform(0.05, 0.95) * (1 - d22 - d33 - 2 * math.sqrt(d22 * d33))
        lo, hi = ad_phi_bounds(q, d22, d33)
        free = ad_phi_cd_free(q, d22, d33)
        if not (lo + 1e-4 < free < hi - 1e-4):
            continue
        sl = SliceParams("amplitude", "Phi", q, 0.5, 0.5, d22=d22, d33=d33)
        below = cd_free_scan(lambda c: slice_state(sl, c), free - 1e-4)
        above = cd_free_scan(lambda c: slice_state(sl, c), free + 1e-4)
        failures += (not below.free) + bool(above.free)
        done += 1
    report("CD-free certification", failures == 0,
           f"{done} slices, {failures} wrong verdicts at cd_free -/+ 1e-4")


def test_depolarization_limit(report):
    rng = np.random.default_rng(SEED)
    spec = ChannelSpec("depolarizing", 0.75, 0.75)
    worst_m = worst_q = 0.0
    for i in range(500):
        x = random_x_state(rng, "Phi" if i % 2 else "Psi")
        xt = evolve_x(x, spec)
        kraus = apply_joint(embed(x), spec).elems
        worst_m = max(worst_m, float(np.max(np.abs(xt.matrix() - np.eye(4) / 4))),
                      float(np.max(np.abs(kraus - np.eye(4) / 4))))
        worst_q = max(worst_q, abs(q_phi(xt) + 0.5))
    report("depolarization limit", worst_m <= 1e-12 and worst_q <= 1e-12,
           f"max |rho - I/4| {worst_m:.2e}, max |Q_Phi + 1/2| {worst_q:.2e} (tol 1e-12)")


def test_lower_bound_audit(report):
    rep = lower_bound_audit(1000, seed=SEED, workers=4)
    ok = rep.samples == 3000 and not rep.violations and rep.max_x_leak <= 1e-12
    report("lower-bound audit", ok,
           f"{rep.samples} states, {len(rep.violations)} violations, min margin {rep.min_margin:.2e}, "
           f"O -> X leak {rep.max_x_leak:.2e} (tol 1e-12)")


def _rel(a, b):
    if a is None or b is None:
        return 0.0 if a is b else math.inf
    return abs(a - b) / max(abs(b), 1e-300)


def test_cd_times_match_oracle(report):
    rng = np.random.default_rng(SEED)
    worst_pd = worst_ad = 0.0
    finite_pd = finite_ad = 0
    for i in range(200):
        x = random_x_state(rng, "Phi" if i % 2 else "Psi", entangled=True)
        sched = DecaySchedule(1.0, 1.0) if i % 4 < 2 else DecaySchedule(1.0, 0.2)
        want = pd_cd_time(x, sched)
        got = onset_time(embed(x), "phase", sched, time_tol=1e-13).time
        worst_pd, finite_pd = max(worst_pd, _rel(got, want)), finite_pd + (want is not None)
    n_ad = 0
    while n_ad < 200:
        x = random_x_state(rng, "Phi", entangled=True)
        if classify(x) is not MatrixType.PHI:
            continue
        want = ad_cd_time_symmetric(x, 1.0)
        if want is not None and want > 40:
            continue  # beyond the oracle's search horizon
        got = onset_time(embed(x), "amplitude", DecaySchedule(1.0, 1.0), time_tol=1e-13).time
        worst_ad, finite_ad = max(worst_ad, _rel(got, want)), finite_ad + (want is not None)
        n_ad += 1
    ok = worst_pd <= 1e-8 and worst_ad <= 1e-8 and finite_pd > 0 and finite_ad > 0
    report("CD times vs oracle", ok,
           f"phase {worst_pd:.2e} ({finite_pd}/200 finite), symmetric amplitude {worst_ad:.2e} "
           f"({finite_ad}/200 finite), tol 1e-8 relative")


def _lo(v):
    return -math.inf if v is None else v


def test_figure_regression(report):
    start = time.perf_counter()
    results = {name: run_sweep(preset_config(name)) for name in PRESETS}
    elapsed = time.perf_counter() - start
    problems = []
    for name, res in results.items():
        for q, sets in zip(res.q_values, res.sets):
            if sets[0] is None:
                continue
            for cs in sets:
                # TD line below the CD line
                if _lo(cs.clamped("td_tol")) > _lo(cs.clamped("cd_tol")) + 1e-12:
                    problems.append(f"{name} Q={q:.3f}: td above cd")
            for a, b in zip(sets, sets[1:]):
                # the later deadline's lines lie below the earlier ones
                for key in ("cd_tol", "td_tol"):
                    if _lo(b.clamped(key)) > _lo(a.clamped(key)) + 1e-12:
                        problems.append(f"{name} Q={q:.3f}: {key} grows with tau")
        robust = [res.robust_count(k) for k in range(len(res.config.taus))]
        if min(robust) == 0:
            problems.append(f"{name}: empty optimal-robust region {robust}")
    for name in PRESETS:
        again = run_sweep(preset_config(name).with_grid(21), threads=1)
        for fname, text in (("phase_map.csv", again.phase_map_csv()),
                            ("boundaries.csv", again.boundaries_csv())):
            if text != (SNAPSHOTS / name / fname).read_text():
                problems.append(f"{name}/{fname}: differs from snapshot")
    digest = {n: hashlib.sha256(r.phase_map_csv().encode()).hexdigest() for n, r in results.items()}
    rerun = run_sweep(preset_config("Fig7"), threads=1)
    if hashlib.sha256(rerun.phase_map_csv().encode()).hexdigest() != digest["Fig7"]:
        problems.append("Fig7 201x201 output depends on thread count")
    ok = not problems and elapsed < 120
    report("figure regression", ok,
           f"{len(PRESETS)} presets at 201x201 in {elapsed:.1f} s (limit 120 s); "
           + ("; ".join(problems[:5]) if problems else "orderings, robust regions, snapshots OK"))


def test_counter_intuitive_witness(report):
    fam = Family()
    fig2 = preset_config("Fig2")
    assert (fam.d22, fam.d33, fam.tau, fam.c_tv) == (fig2.fixed["d22"], fig2.fixed["d33"],
                                                   fig2.taus[0], fig2.c_tv)
    pair, regions = cd_pair(fam), region_pair(fam)
    ok = pair is not None and regions is not None
    detail = "no witness found"
    if ok:
        low, high = pair
        ok &= low.q < high.q and low.t_cd is not None and high.t_cd is not None and low.t_cd > high.t_cd
        r_i, r_ii = regions
        lab_i = critical_set(fam.slice(r_i.q)).label(r_i.coord)
        lab_ii = critical_set(fam.slice(r_ii.q)).label(r_ii.coord)
        ok &= (lab_i.cd, lab_i.td) == (CDPhase.FREE, TDPhase.NOGO)
        ok &= (lab_ii.cd, lab_ii.td) == (CDPhase.TOLERABLE, TDPhase.TOLERABLE)
        # region i never disentangles yet crosses C_tv first
        ok &= r_i.t_cd is None and r_ii.t_cd is not None and r_ii.t_cd >= fam.tau
        ok &= r_i.t_tv is not None and r_i.t_tv < fam.tau <= r_ii.t_tv
        detail = (f"Q {low.q:.3g} < {high.q:.3g} with t_CD {low.t_cd:.4g} > {high.t_cd:.4g}; "
                  f"region i t_CD=never t_TV={r_i.t_tv:.4g}, region ii t_CD={r_ii.t_cd:.4g} "
                  f"t_TV={r_ii.t_tv:.4g}")
    report("counter-intuitive witness", ok, detail)
