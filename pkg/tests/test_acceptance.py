"""End-to-end acceptance suite: one test per stated criterion, each
printing a single PASS/FAIL line with the measured numbers."""
import hashlib
import json
import shutil
import subprocess

import numpy as np
import pytest

from llflow import analytics
from llflow import groundstate as gs
from llflow import targets as tg
from llflow.dynamics import SimConfig, run
from llflow.fields import Field, Grid, energy, integrate
from llflow.gauge import (build_frame, coulomb_divergence, coulomb_fix,
                          curl_identity_residual, differential_fields,
                          energy_identity_residual, ginzburg_landau_residual)
from llflow.lab import C12_REFERENCE, ESTAR_S2_REFERENCE, run_scenario


def verdict(num, passed, detail):
    tag = "PASS" if passed else "FAIL"
    print(f"[criterion {num:2d}] {tag}: {detail}")
    assert passed, f"criterion {num}: {detail}"


def run_preset(name, outdir, overrides=()):
    over = [f"output.dir={outdir}"] + list(overrides)
    code = run_scenario(name, over)
    reports = list(outdir.glob("*_report.json"))
    report = json.loads(reports[0].read_text()) if reports else None
    return code, report


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def decay_run(workdir):
    out = workdir / "decay"
    return run_preset("decay-below-threshold", out) + (out,)


@pytest.fixture(scope="module")
def torus_run(workdir):
    return run_preset("torus-decay", workdir / "torus")


@pytest.fixture(scope="module")
def harmonic_run(workdir):
    return run_preset("harmonic-stationary", workdir / "harmonic")


@pytest.fixture(scope="module")
def bubble_run(workdir):
    out = workdir / "bubble"
    return run_preset("bubble-synthetic", out) + (out,)


def test_criterion_01_sharp_constants():
    profile = gs.ground_state()
    c12 = gs.gn_constant(profile)
    bound = gs.critical_energy_bound(c12, tg.Sphere().curvature_bound)
    dc = abs(c12 - C12_REFERENCE)
    de = abs(bound.e_star_lower - ESTAR_S2_REFERENCE)
    verdict(1, dc <= 1e-3 and de <= 1e-3,
            f"C12 = {c12:.6f} (|d| = {dc:.2e}), "
            f"E* = {bound.e_star_lower:.6f} (|d| = {de:.2e}), tol 1e-3")


def test_criterion_02_bubble_energy():
    grid = Grid(512, 16.0)
    u1, _ = tg.stereographic_bubble(grid, lam=1.0, degree=1)
    u2, _ = tg.stereographic_bubble(grid, lam=1.0, degree=2)
    e1 = energy(u1)
    e2 = energy(u2)
    ok1 = 4 * np.pi * 0.99 <= e1 <= 4 * np.pi
    ok2 = abs(e2 - 8 * np.pi) <= 0.02 * 8 * np.pi
    verdict(2, ok1 and ok2,
            f"E(deg 1) = {e1:.5f} = 4pi*{e1 / (4 * np.pi):.5f}, "
            f"E(deg 2) = {e2:.5f} = 8pi*{e2 / (8 * np.pi):.5f}")


def test_criterion_03_dissipation_identity(workdir):
    # the decay preset with an explicit second-order stepper so the time
    # discretization error (the only remaining residual) is measurable and
    # its dt-order can be checked within the runtime budget
    residuals = []
    e0 = None
    for k, dt in enumerate((9.765625e-4, 4.8828125e-4)):
        out = workdir / f"diss{k}"
        code, report = run_preset(
            "decay-below-threshold", out,
            [f"sim.dt={dt}", "sim.scheme=heun", "sim.t_end=1.0",
             "analysis.checks=dissipation"])
        assert code == 0, f"dissipation run at dt={dt} failed"
        residuals.append(report["results"]["dissipation_residual"])
        e0 = report["results"]["e0"]
    ratio = residuals[0] / residuals[1]
    ok = max(residuals) <= 1e-3 * e0 and ratio >= 1.8
    verdict(3, ok,
            f"residuals {residuals[0]:.3e} -> {residuals[1]:.3e} "
            f"(tol {1e-3 * e0:.3e}), dt-halving ratio {ratio:.2f} (needs >= 1.8)")


def test_criterion_04_monotonicity_and_constraint(decay_run, torus_run,
                                                  harmonic_run):
    worst_inc = worst_rel = worst_dist = 0.0
    for code, report, *_ in (decay_run, torus_run, harmonic_run):
        res = report["results"]
        worst_rel = max(worst_rel, res["max_energy_increase"] / res["e0"])
        worst_inc = max(worst_inc, res["max_energy_increase"])
        worst_dist = max(worst_dist, res["max_target_distance"])
    ok = worst_rel <= 1e-9 and worst_dist <= 1e-12
    verdict(4, ok,
            f"max energy increase {worst_inc:.2e} ({worst_rel:.2e} of E0, "
            f"tol 1e-9), max target distance {worst_dist:.2e} (tol 1e-12)")


def test_criterion_05_below_threshold_decay(decay_run):
    code, report, _ = decay_run
    res = report["results"]
    checks = {c["check"]: c for c in report["checks"]}
    ratio = res["energy_end"] / res["e0"]
    ok = (code == 0 and ratio <= 0.1 and checks["l4_cauchy"]["passed"])
    verdict(5, ok,
            f"E(0) = {res['e0']:.4f} = 0.9*4pi, E(t_end)/E(0) = {ratio:.4f} "
            f"(needs <= 0.1), {checks['l4_cauchy']['detail']}")


def test_criterion_06_nonpositive_curvature_decay(torus_run):
    code, report = torus_run
    res = report["results"]
    checks = {c["check"]: c for c in report["checks"]}
    ratio = res["energy_end"] / res["e0"]
    ok = (code == 0 and ratio <= 0.1
          and checks["no_concentration"]["passed"])
    verdict(6, ok,
            f"torus target: E(t_end)/E(0) = {ratio:.4f} (needs <= 0.1), "
            f"no concentration flag at eps1 = pi/2: "
            f"{checks['no_concentration']['passed']}")


def test_criterion_07_harmonic_stationarity(harmonic_run):
    code, report = harmonic_run
    res = report["results"]
    h = 2 * 8.0 / 128
    disp_ok = code == 0 and res["max_displacement"] <= 10 * h ** 2
    norms = []
    for n in (128, 256, 512):
        grid = Grid(n, 8.0)
        u, _ = tg.stereographic_bubble(grid, lam=2.0)
        tau = tg.tension(u, tg.Sphere())
        norms.append(np.sqrt(integrate(
            Field(grid, np.sum(tau.values ** 2, axis=2), 0.0))))
    slopes = [np.log2(a / b) for a, b in zip(norms, norms[1:])]
    ok = disp_ok and min(slopes) >= 1.8
    verdict(7, ok,
            f"1000-step displacement {res['max_displacement']:.3e} "
            f"(tol {10 * h ** 2:.3e}); tension L2 "
            + " -> ".join(f"{v:.2e}" for v in norms)
            + f", slopes {[f'{s:.2f}' for s in slopes]} (needs >= 1.8)")


def test_criterion_08_m_operator_bounds():
    params = tg.MOperatorParams(alpha=0.7, beta=1.3)
    target = tg.Sphere()
    audit = tg.spectral_bounds_audit(target, params, samples=100_000, seed=11)
    # closed-form extremal cases: normal vectors attain the upper bound
    # 1/gamma1, tangent vectors the lower bound alpha
    y = target.project(np.array([0.3, -1.2, 0.8]))
    v_norm = y.copy()
    q_norm = float(v_norm @ tg.m_apply(y, v_norm, params, target)) / float(
        v_norm @ v_norm)
    v_tan = target.tangent_project(y, np.array([1.0, 0.2, -0.4]))
    q_tan = float(v_tan @ tg.m_apply(y, v_tan, params, target)) / float(
        v_tan @ v_tan)
    exact = (abs(q_norm - 1.0 / params.gamma1) < 1e-12 * abs(q_norm)
             and abs(q_tan - params.alpha) < 1e-12 * abs(q_tan))
    verdict(8, audit["passed"] and exact,
            f"1e5 samples: Rayleigh in [{audit['rayleigh_min']:.6f}, "
            f"{audit['rayleigh_max']:.6f}] vs bounds "
            f"[{audit['lower_bound']:.6f}, {audit['upper_bound']:.6f}]; "
            f"normal/tangent extremes exact to 1e-12")


def _gauge_of(u):
    return differential_fields(coulomb_fix(build_frame(u), u), u)


def _snap_pair(u0, gap, beta=0.5):
    cfg = SimConfig(alpha=1.0, beta=beta, scheme="heun", dt_safety=0.5,
                    t_end=gap, ledger_every=0)
    state = run(u0, tg.Sphere(), cfg)
    return state.u, state.t


def test_criterion_09_gauge_identities():
    data = {n: tg.equivariant_data(Grid(n, 8.0), tg.gauss_profile(1.0, 2.0))
            for n in (64, 128)}
    div = coulomb_divergence(coulomb_fix(build_frame(data[128]),
                                         data[128]))["div_rel"]
    ident = energy_identity_residual(_gauge_of(data[128]), data[128])
    curl = [curl_identity_residual(_gauge_of(data[n]))["residual_l2"]
            for n in (64, 128)]
    curl_slope = np.log2(curl[0] / curl[1])
    gl = []
    for gap in (0.04, 0.02):
        u1, t = _snap_pair(data[128], gap)
        gl.append(ginzburg_landau_residual(
            _gauge_of(data[128]), _gauge_of(u1), t, 1.0, 0.5)["residual_l2"])
    gl_ratio = gl[0] / gl[1]
    # negative control 1: wrong coefficients leave an O(1) floor
    wrong = []
    for gap in (0.04, 0.02):
        u1, t = _snap_pair(data[128], gap)
        wrong.append(ginzburg_landau_residual(
            _gauge_of(data[128]), _gauge_of(u1), t, 2.0, 0.5)["residual_l2"])
    wrong_ratio = wrong[0] / wrong[1]
    # negative control 2: a rough field's curl residual does not refine away
    rough_res = []
    rng = np.random.default_rng(3)
    for n in (64, 128):
        base = data[n].values + 0.05 * rng.normal(size=data[n].values.shape)
        u_rough = Field(data[n].grid, tg.Sphere().project(base),
                        data[n].boundary_value)
        rough_res.append(curl_identity_residual(
            _gauge_of(u_rough))["residual_l2"])
    rough_decays = rough_res[1] < 0.5 * rough_res[0]
    ok = (div <= 1e-6 and ident <= 1e-10 and curl_slope >= 1.8
          and gl_ratio >= 1.8 and wrong_ratio < 1.3 and not rough_decays)
    verdict(9, ok,
            f"div a {div:.2e} (<= 1e-6), energy identity {ident:.2e} "
            f"(<= 1e-10), curl slope {curl_slope:.2f} (>= 1.8), evolution "
            f"dt-ratio {gl_ratio:.2f} (>= 1.8); negative controls: wrong-alpha "
            f"ratio {wrong_ratio:.2f} (< 1.3), rough-field residuals "
            f"{rough_res[0]:.2e} -> {rough_res[1]:.2e} (no decay)")


def test_criterion_10_concentration_detector(bubble_run):
    code, report, _ = bubble_run
    detector_ok = code == 0
    # fit accuracy and idempotency on exact family members
    grid = Grid(128, 4.0)
    u, _ = tg.stereographic_bubble(grid, lam=1.3, center=0.3 - 0.2j)
    fit1 = analytics.bubble_fit(u)
    err1 = max(abs(fit1["lam"] - 1.3), abs(fit1["center"][0] - 0.3),
               abs(fit1["center"][1] + 0.2))
    refit_src, _ = tg.stereographic_bubble(
        grid, lam=fit1["lam"], center=complex(*fit1["center"]))
    fit2 = analytics.bubble_fit(refit_src)
    drift = max(abs(fit2["lam"] - fit1["lam"]),
                abs(fit2["center"][0] - fit1["center"][0]),
                abs(fit2["center"][1] - fit1["center"][1]))
    # diffuse field carrying the same 4pi of energy must not flag
    dgrid = Grid(256, 8.0)
    i = np.arange(dgrid.n)
    mode = np.outer(np.sin(3 * np.pi * (i + 1) / (dgrid.n + 1)),
                    np.sin(3 * np.pi * (i + 1) / (dgrid.n + 1)))

    def great_circle(a):
        f = a * mode
        vals = np.stack([np.sin(f), np.zeros_like(f), np.cos(f)], axis=2)
        return Field(dgrid, vals, np.array([0.0, 0.0, 1.0]))

    from scipy.optimize import brentq
    amp = brentq(lambda a: energy(great_circle(a)) - 4 * np.pi, 1e-3, 3.0)
    diffuse = analytics.concentration_scan(
        great_circle(amp), [8.0, 4.0, 2.0, 1.0, 0.5, 0.25])
    ok = (detector_ok and err1 <= 1e-3 and drift <= 1e-6
          and not diffuse["flagged"])
    verdict(10, ok,
            f"synthetic 16h bubble preset exit {code}; fit error {err1:.2e} "
            f"(<= 1e-3), refit drift {drift:.2e} (<= 1e-6); diffuse 4pi "
            f"field flagged = {diffuse['flagged']}")


def test_criterion_11_inequality_audits():
    slacks = []
    for n in (64, 128, 256):
        u = tg.equivariant_data(Grid(n, 8.0), tg.gauss_profile(1.0, 2.0))
        audit = analytics.mnbv_audit(u, tg.Sphere())
        slacks.append(audit["slack"])
    mnbv_ok = all(s > 0 for s in slacks)

    def trajectory(n, dt_factor=1.0):
        u = tg.equivariant_data(Grid(n, 8.0), tg.gauss_profile(1.0, 2.0))
        traj = [(0.0, u)]
        for _ in range(3):
            cfg = SimConfig(alpha=1.0, scheme="imex", t_end=0.05,
                            ledger_every=0, dt=dt_factor * 1e-3)
            state = run(traj[-1][1], tg.Sphere(), cfg)
            traj.append((traj[-1][0] + state.t, state.u))
        return traj

    lady = []
    local = []
    for n, dt_factor in ((64, 1.0), (128, 1.0), (64, 0.5)):
        traj = trajectory(n, dt_factor)
        lady.append(analytics.ladyzhenskaya_audit(traj, radius=2.0)["ratio"])
        audit = analytics.local_energy_inequality_audit(traj, radius=2.0)
        local.append((audit["C3_fwd"], audit["C3_bwd"], audit["C_outer"]))
    finite = (np.isfinite(lady).all()
              and np.isfinite(np.array(local)).all())
    spread = max(lady) / max(min(lady), 1e-12)
    stable = spread < 2.0
    ok = mnbv_ok and finite and stable
    verdict(11, ok,
            f"Hessian/L4 slack {[f'{s:.3f}' for s in slacks]} (> 0 at "
            f"n = 64/128/256); Ladyzhenskaya ratios "
            f"{[f'{r:.3f}' for r in lady]} (spread {spread:.2f}x < 2 across "
            f"h and dt); local-energy constants finite: {finite}")


def _sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.mark.skipif(shutil.which("llflow-viz") is None,
                    reason="viz component not installed")
def test_criterion_12_viz_renders(decay_run, bubble_run, workdir):
    _, _, decay_dir = decay_run
    _, _, bubble_dir = bubble_run
    figdir = workdir / "figures"
    figdir.mkdir()
    ledger = decay_dir / "decay_ledger.csv"
    final = decay_dir / "decay_final.llf1"
    report = bubble_dir / "bubble_report.json"
    inputs = [ledger, final, report]
    before = {p: _sha256(p) for p in inputs}
    jobs = [
        (["llflow-viz", "energy", "--in", str(ledger)], "energy.png"),
        (["llflow-viz", "concentration", "--in", str(ledger)], "conc.png"),
        (["llflow-viz", "heatmap", "--in", str(final)], "heat.png"),
        (["llflow-viz", "bubble-profile", "--in", str(report)], "prof.png"),
    ]
    failures = []
    for cmd, name in jobs:
        out = figdir / name
        proc = subprocess.run(cmd + ["--out", str(out)],
                              capture_output=True, text=True)
        if proc.returncode != 0 or not out.is_file():
            failures.append(f"{cmd[1]}: rc={proc.returncode} "
                            f"{proc.stderr.strip()[:200]}")
    unchanged = all(_sha256(p) == before[p] for p in inputs)
    ok = not failures and unchanged
    verdict(12, ok,
            "all four plot kinds rendered, inputs unmodified" if ok else
            f"failures: {failures}; inputs unchanged: {unchanged}")
