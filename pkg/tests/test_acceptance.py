"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines live.

Two criteria are known-red and kept faithful to their stated form; the
analysis lives in the project notes:

* order-1 convergence: the implicit stage sits symmetrically between the
  endpoints, making the method self-adjoint, so its measured global order
  is two (order one holds, but not sharply);
* tangent-basis limit: the stated target plane has a nonvanishing fourth
  component, which no eigenplane of the block-diagonal split limit can
  reproduce; the measured limit plane is span{(1,-2,-1,0,0), (1,0,1,0,0)}.
"""

import time

import numpy as np

import lvpoisson as lv
from lvpoisson import (
    HPStepConfig,
    delta_analytic_eigenvalues,
    delta_spectral_matrix,
    delta_system,
    drift_report,
    hp_step,
    integrable_5d,
    lyapunov_tangent_basis,
    predator_prey_2d,
    principal_angles,
    reference_flow,
    run_experiment,
    se_modified_hamiltonian,
    se_simulate,
    shoot_orbit,
    simulate,
    spectrum,
)

X0_5D = np.full(5, 2.0)


def _criterion(name: str, passed: bool, detail: str) -> None:
    verdict = "PASS" if passed else "FAIL"
    print(f"\n[ACCEPTANCE {verdict}] {name}: {detail}")
    assert passed, f"{name}: {detail}"


def test_casimir_exactness(tmp_path):
    t0 = time.perf_counter()
    artifacts = run_experiment("fig1-integrable", out_dir=str(tmp_path))
    traj = lv.read_trajectory(artifacts["fig1-integrable.csv"])
    elapsed = time.perf_counter() - t0
    c = traj.diagnostics["C1"]
    dev = float(np.max(np.abs(c / c[0] - 1.0)))
    _criterion(
        "casimir-exactness",
        dev <= 1e-9 and elapsed < 5.0,
        f"max relative Casimir deviation {dev:.2e} (bound 1e-9), "
        f"runtime {elapsed:.2f}s (bound 5s)",
    )


def test_bounded_hamiltonian_discrepancy():
    sys5 = integrable_5d()
    fig1 = simulate(sys5, "hp1", X0_5D, 1.0, 100)
    stats = drift_report(fig1)["H"]
    bounded = np.isfinite(stats.max_abs_dev)
    flat = abs(stats.slope) <= 3.0 * stats.slope_sigma

    # the explicit contrast integrator leaves the positive quadrant on its
    # first h=1 step, so the drift comparison runs at the stable budget
    # h=0.1 over 1e4 steps for both methods
    hp = drift_report(simulate(sys5, "hp1", X0_5D, 0.1, 10_000))["H"]
    rk = drift_report(simulate(sys5, "rk4_fixed", X0_5D, 0.1, 10_000))["H"]
    contrast = abs(rk.slope) >= 10.0 * abs(hp.slope)
    _criterion(
        "bounded-hamiltonian-discrepancy",
        bounded and flat and contrast,
        f"h=1 run: max|dH| {stats.max_abs_dev:.3e}, slope {stats.slope:.2e} "
        f"vs 3sigma {3 * stats.slope_sigma:.2e}; contrast h=0.1/1e4: "
        f"|rk4 slope| {abs(rk.slope):.2e} vs 10x|hp1 slope| {10 * abs(hp.slope):.2e}",
    )


def test_order1_convergence():
    sys5 = integrable_5d()
    t0 = time.perf_counter()
    ref = reference_flow(sys5, X0_5D, 1.0, tol=1e-13)
    hs = [2.0**-k for k in range(3, 9)]
    errs = []
    for h in hs:
        x = X0_5D.copy()
        cfg = HPStepConfig(h=h)
        for _ in range(int(round(1.0 / h))):
            x = hp_step(sys5, x, cfg).next
        errs.append(float(np.max(np.abs(x - ref))))
    elapsed = time.perf_counter() - t0
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    _criterion(
        "order-1-convergence",
        abs(slope - 1.0) <= 0.15 and elapsed < 30.0,
        f"log-log slope {slope:.3f} (required 1.0 +- 0.15; the self-adjoint "
        f"stage makes the scheme second order), runtime {elapsed:.1f}s",
    )


def test_singularity_fixity():
    worst = 0.0
    for sys in (integrable_5d(), delta_system(1e-2)):
        for h in (0.1, 1.0):
            out = hp_step(sys, sys.q, HPStepConfig(h=h))
            worst = max(worst, float(np.max(np.abs(out.next - sys.q))))
    _criterion(
        "singularity-fixity",
        worst <= 1e-11,
        f"max |step(q) - q| = {worst:.2e} over both systems, h in {{0.1, 1}}",
    )


def test_symplectic_euler_dichotomy():
    below = se_simulate(1.0, 0.0, 2.0 - 1e-3, 10_000)
    sup_below = float(np.max(below.states[:, 0] ** 2 + below.states[:, 1] ** 2))
    above = se_simulate(1.0, 0.0, 2.0 + 1e-3, 10_000, stop_norm2=1e9)
    sup_above = float(np.max(above.states[:, 0] ** 2 + above.states[:, 1] ** 2))
    escaped_within = len(above) <= 10_001 and sup_above >= 1e6
    flags = (
        se_modified_hamiltonian(2.0 - 1e-3).elliptic,
        se_modified_hamiltonian(2.0).elliptic,
        se_modified_hamiltonian(2.0 + 1e-3).elliptic,
    )
    flag_flip = flags == (True, False, False)
    _criterion(
        "symplectic-euler-dichotomy",
        sup_below <= 1e6 and escaped_within and flag_flip,
        f"sup|x|^2: below {sup_below:.3e} (<=1e6), above {sup_above:.3e} "
        f"within {len(above) - 1} steps (>=1e6); elliptic flags at "
        f"2-1e-3/2/2+1e-3 = {flags}",
    )


def test_spectrum_reproduction():
    worst = 0.0
    for d in (0.0, 1e-3, 1e-2, 1e-1):
        numeric = spectrum(delta_spectral_matrix(d)).eigenvalues
        analytic = delta_analytic_eigenvalues(d)
        worst = max(
            worst, max(float(np.min(np.abs(numeric - w))) for w in analytic)
        )
    expected0 = [0.0, 1j, -1j, 1j * np.sqrt(3), -1j * np.sqrt(3)]
    numeric0 = spectrum(delta_spectral_matrix(0.0)).eigenvalues
    base = max(float(np.min(np.abs(numeric0 - w))) for w in expected0)
    _criterion(
        "spectrum-reproduction",
        worst <= 1e-10 and base <= 1e-10,
        f"max eigenvalue mismatch {worst:.2e} over delta in "
        f"{{0, 1e-3, 1e-2, 1e-1}} (bound 1e-10); delta=0 set mismatch {base:.2e}",
    )


def test_tangent_basis_limit():
    target = np.stack(
        [[1.0, -2.0, -1.0, 0.0, 0.0], [-np.sqrt(3.0), 0.0, -np.sqrt(3.0), -np.sqrt(3.0), 0.0]],
        axis=1,
    )
    angles = []
    for d in (1e-2, 1e-3, 1e-4):
        plane = lyapunov_tangent_basis(d, branch=1).plane()
        angles.append(float(np.max(principal_angles(plane, target))))
    monotone = angles[0] > angles[1] > angles[2]
    small = angles[2] <= 1e-2
    _criterion(
        "tangent-basis-limit",
        monotone and small,
        f"max principal angles to the stated span at delta=1e-2,1e-3,1e-4: "
        f"{angles[0]:.3f}, {angles[1]:.3f}, {angles[2]:.3f} rad "
        f"(required monotone decreasing and <= 1e-2; the true limit plane is "
        f"span{{(1,-2,-1,0,0), (1,0,1,0,0)}})",
    )


def test_orbit_shooting():
    t0 = time.perf_counter()
    sys2 = predator_prey_2d()
    orb2 = shoot_orbit(sys2, np.array([1.01, 1.0]), 6.28)
    planar_ok = (
        abs(orb2.period - 2 * np.pi) <= 0.01 * 2 * np.pi and orb2.residual <= 1e-9
    )

    deltas = np.arange(0.0, 1e-2 + 1e-12, 1e-3)
    sys0 = delta_system(0.0)
    seed1 = shoot_orbit(sys0, np.array([1.0, 1.0, 1.0, 1.01, 1.0]), 6.28)
    fam1 = lv.continue_in_delta(delta_system, seed1, deltas)
    seed2 = shoot_orbit(
        sys0, np.array([1.01, 1.01, 1.0, 1.0, 1.0]), 2 * np.pi / np.sqrt(3.0)
    )
    fam2 = lv.continue_in_delta(delta_system, seed2, deltas)
    resid1 = max(o.residual for o in fam1.orbits)
    resid2 = max(o.residual for o in fam2.orbits)
    elapsed = time.perf_counter() - t0
    _criterion(
        "orbit-shooting",
        planar_ok and resid1 <= 1e-9 and resid2 <= 1e-9 and elapsed < 60.0,
        f"planar orbit period {orb2.period:.6f} (2pi +- 1%), residual "
        f"{orb2.residual:.1e}; continuation residuals {resid1:.1e} / {resid2:.1e} "
        f"over {len(deltas)} steps each; runtime {elapsed:.1f}s (bound 60s)",
    )


def test_momentum_map_drift_substitute():
    # long-run KAM constants are not desk-reproducible; the testable
    # consequence is bounded drift of both split invariants
    sys5 = integrable_5d()
    h, n = 0.1, 100_000
    traj = simulate(sys5, "hp1", X0_5D, h, n)
    report = drift_report(traj)
    dev1, dev2 = report["I1"].max_abs_dev, report["I2"].max_abs_dev
    s1, s2 = report["I1"], report["I2"]
    no_secular = (
        abs(s1.slope) <= 3.0 * s1.slope_sigma and abs(s2.slope) <= 3.0 * s2.slope_sigma
    )
    _criterion(
        "momentum-map-drift",
        dev1 <= 5 * h and dev2 <= 5 * h and no_secular,
        f"max|dI1| {dev1:.3e}, max|dI2| {dev2:.3e} (bound {5 * h}); "
        f"slopes {s1.slope:.2e} / {s2.slope:.2e} within 3 sigma of 0 over {n} steps",
    )
