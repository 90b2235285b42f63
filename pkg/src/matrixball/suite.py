"""Acceptance battery: the twelve numbered checks behind the test suite and CLI.

Each criterion_* function runs one self-contained numerical experiment at a
fixed tolerance and returns a CriterionResult. The "full" profile is the
authoritative configuration; "quick" shrinks sample counts for smoke runs and
for the determinism re-run check, exercising the same code paths.

Wall-clock time is recorded on the result object and printed by callers, but
it is never serialized into artifacts: criterion 12 requires byte-identical
outputs across reruns.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import json
import os
import subprocess
import sys
import tempfile
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import __version__, boundary, fatou, group, hua, ktypes, poisson
from .errors import ConvergenceError
from .structure import restricted_roots, spectral_param, structure_data

DOMAINS = ((1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (3, 1))


def parallel_map(fn, items, workers: int | None = None):
    """Order-preserving map, threaded when workers > 1 (results deterministic)."""
    if workers is None:
        workers = int(os.environ.get("MATRIXBALL_WORKERS", "1"))
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    worst: float
    tol: float
    budget_s: float
    elapsed_s: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return "criterion %2d %-22s %s  worst %.3e (tol %.1e)  [%.1fs]" % (
            self.index, self.name, status, self.worst, self.tol, self.elapsed_s)


def _sanitize(obj):
    """Make details JSON-serializable deterministically."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    return obj


# ---------------------------------------------------------------------------
# 1. restricted roots by brute force
# ---------------------------------------------------------------------------

def criterion_structure(seed: int = 7, profile: str = "full") -> CriterionResult:
    details = {}
    ok = True
    for r, b in DOMAINS:
        sd = structure_data(r, b)
        roots = restricted_roots(sd)  # raises on any internal mismatch
        expect = {}
        for j in range(1, r + 1):
            expect["beta_%d" % j] = 1
            expect["beta_%d/2" % j] = 2 * b
        for j in range(1, r + 1):
            for k in range(j + 1, r + 1):
                expect["(beta_%d-beta_%d)/2" % (j, k)] = sd.a
                expect["(beta_%d+beta_%d)/2" % (j, k)] = sd.a
        match = roots == expect and sd.n == r * (r + b)
        ok = ok and match
        details["r%d_b%d" % (r, b)] = {"roots": roots, "n": sd.n, "match": match}
    return CriterionResult(1, "structure-roots", ok, 0.0 if ok else 1.0, 0.0, 1.0,
                           details=details)


# ---------------------------------------------------------------------------
# 2. cocycle identity and the conjugation contraction inequality
# ---------------------------------------------------------------------------

def _nbar_basis(sd) -> np.ndarray:
    """Real basis of the opposite unipotent algebra (ad(X0) grades -1, -2)."""
    from .structure import root_decomposition

    mats = []
    for vals, ms in root_decomposition(sd):
        if round(float(np.sum(vals))) in (-1, -2):
            mats.extend(ms)
    return np.array(mats)


def cocycle_battery(sd, pairs: int, contraction_samples: int, seed: int) -> dict:
    """Residuals of h1(x kappa(y)) = h1(xy) - h1(y) plus the contraction count."""
    worst = 0.0
    for i in range(pairs):
        x = group.random_group_element(seed + 2 * i, 0.7, sd)
        y = group.random_group_element(seed + 2 * i + 1, 0.7, sd)
        ky = group.kappa_factor(y, sd)
        lhs = group.h1_scalar(x @ ky, sd)
        rhs = group.h1_scalar(x @ y, sd) - group.h1_scalar(y, sd)
        worst = max(worst, abs(lhs - rhs))

    E = _nbar_basis(sd)
    rng = np.random.default_rng(seed + 10 ** 6)
    coords = rng.normal(scale=1.5, size=(contraction_samples, len(E)))
    A = np.tensordot(coords, E, axes=(1, 0))
    nbar = np.eye(sd.m) + A + 0.5 * (A @ A)  # exact: the algebra is 2-step
    ts = rng.uniform(0.1, 4.0, size=contraction_samples)
    h_base = group._kernels.h1_batch(nbar, sd.r)
    violations = 0
    gap_min = np.inf
    for j in range(contraction_samples):
        at = group.radial(float(ts[j]), sd)
        atm = group.radial(-float(ts[j]), sd)
        h_conj = group.h1_scalar(at @ nbar[j] @ atm, sd)
        gap_min = min(gap_min, h_base[j] - h_conj)
        if h_conj > h_base[j] + 1e-10:
            violations += 1
    return {"cocycle_worst": worst, "violations": violations,
            "contraction_min_gap": float(gap_min)}


def criterion_cocycle(seed: int = 7, profile: str = "full") -> CriterionResult:
    pairs = 200 if profile == "full" else 20
    nsamp = 1000 if profile == "full" else 100
    domains = DOMAINS if profile == "full" else ((1, 1), (2, 1))
    outs = parallel_map(
        lambda rb: cocycle_battery(structure_data(*rb), pairs, nsamp, seed), domains)
    details = {"r%d_b%d" % rb: out for rb, out in zip(domains, outs)}
    worst = max(out["cocycle_worst"] for out in outs)
    violations = sum(out["violations"] for out in outs)
    ok = worst <= 1e-9 and violations == 0
    details["total_violations"] = violations
    return CriterionResult(2, "cocycle-suite", ok, worst, 1e-9, 10.0, details=details)


# ---------------------------------------------------------------------------
# 3. kernel determinant form vs horospherical form
# ---------------------------------------------------------------------------

def kernel_form_battery(sd, n_pairs: int, seed: int, s_values=(2.0, 3.0 + 0.5j)) -> float:
    worst = 0.0
    sps = [spectral_param(s, sd) for s in s_values]
    Z0 = np.zeros((sd.r, sd.q), dtype=np.complex128)
    U0 = group.base_point(sd)
    rng = np.random.default_rng(seed + 31)
    for i in range(n_pairs):
        g = group.random_group_element(seed + 3 * i, 0.6, sd)
        Ak = np.linalg.qr(rng.normal(size=(sd.r, sd.r)) + 1j * rng.normal(size=(sd.r, sd.r)))[0]
        Dk = np.linalg.qr(rng.normal(size=(sd.q, sd.q)) + 1j * rng.normal(size=(sd.q, sd.q)))[0]
        kt = np.zeros((sd.m, sd.m), dtype=np.complex128)
        kt[: sd.r, : sd.r] = Ak
        kt[sd.r :, sd.r :] = Dk
        kt *= np.exp(-1j * np.angle(np.linalg.det(kt)) / sd.m)  # land in SU(m)
        Z = group.mobius(g, Z0)
        U = group.mobius(kt, U0)
        hval = group.h1_scalar(group.group_inverse(g, sd) @ kt, sd)
        for sp in sps:
            lhs = poisson.kernel(sp, Z, U)
            rhs = np.exp(-(sp.s * sd.r + sd.n) * hval)
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    return worst


def criterion_kernel_form(seed: int = 7, profile: str = "full") -> CriterionResult:
    n_pairs = 300 if profile == "full" else 30
    domains = DOMAINS if profile == "full" else ((1, 1), (2, 1))
    outs = parallel_map(
        lambda rb: kernel_form_battery(structure_data(*rb), n_pairs, seed), domains)
    details = {"r%d_b%d" % rb: {"worst_rel_err": w} for rb, w in zip(domains, outs)}
    worst = max(outs)
    return CriterionResult(3, "kernel-form", worst <= 1e-9, worst, 1e-9, 10.0,
                           details=details)


# ---------------------------------------------------------------------------
# 4. Hua eigenvalue equation
# ---------------------------------------------------------------------------

def criterion_hua(seed: int = 7, profile: str = "full") -> CriterionResult:
    domains = ((1, 1), (2, 1)) if profile == "full" else ((1, 1),)
    s_values = (2.0, 3.0, 4.0 + 1.0j) if profile == "full" else (2.0,)
    n_pts = 5 if profile == "full" else 2
    details = {}
    ok = True
    worst = 0.0
    for r, b in domains:
        sd = structure_data(r, b)
        basis = hua.hua_basis(sd)
        pairs = hua._sample_pairs(sd, n_pts, seed)
        dom = {}
        for s in s_values:
            sp = spectral_param(s, sd)
            res = [hua.eigen_residual(sp, g, U, basis) for g, U in pairs]
            dom["s_%s" % s] = {"residuals": res, "max": max(res)}
            worst = max(worst, max(res))
            ok = ok and max(res) <= 1e-4
        # zero eigenvalue at the harmonic point s = r + b
        sph = spectral_param(float(r + b), sd)
        zero_worst = 0.0
        for g, U in pairs:
            F = hua.lift_kernel(sph, U)
            H = hua.hua_second(F, g, basis)
            zero_worst = max(zero_worst, float(np.max(np.abs(H)) / abs(F(g))))
        dom["harmonic_zero_residual"] = zero_worst
        ok = ok and zero_worst <= 1e-5
        details["r%d_b%d" % (r, b)] = dom
    if profile == "full":
        sd = structure_data(1, 1)
        slope = hua.measure_fd_order(spectral_param(2.0, sd), hua.hua_basis(sd),
                                     order=4, seed=seed + 23)
        details["fd_slope_order4"] = slope
        ok = ok and abs(slope - 4.0) <= 0.3
    return CriterionResult(4, "hua-eigenvalue", ok, worst, 1e-4, 300.0, details=details)


# ---------------------------------------------------------------------------
# 5. third-order ratio
# ---------------------------------------------------------------------------

def criterion_third_order(seed: int = 7, profile: str = "full") -> CriterionResult:
    sd = structure_data(1, 1)
    if profile == "full":
        s_list = (2.4, 2.8, 3.2, 3.6, 4.4, 4.8, 5.2, 5.6, 6.0, 6.4)
        samples = 10
    else:
        s_list = (2.4, 3.2, 4.4, 5.2)
        samples = 3
    sps = [spectral_param(s, sd) for s in s_list]
    rep = hua.third_order_ratio(sps, samples=samples, seed=seed + 70)
    cv_worst = float(np.max(rep.cvs))
    ok = cv_worst <= 1e-2 and rep.c_rel_err <= 0.02
    details = {
        "s_values": list(s_list),
        "cvs": rep.cvs,
        "ratios": rep.ratios,
        "c_fit": rep.c_fit,
        "c_expected": rep.c_expected,
        "c_rel_err": rep.c_rel_err,
        "p_fit": rep.p_fit,
        "p_denominator": rep.p_denominator,
        "genus_candidate": rep.genus_candidate,
        "fit_residual": rep.fit_residual,
    }
    return CriterionResult(5, "third-order-ratio", ok, cv_worst, 1e-2, 600.0,
                           details=details)


# ---------------------------------------------------------------------------
# 6. c_s by three routes
# ---------------------------------------------------------------------------

def criterion_cs(seed: int = 7, profile: str = "full") -> CriterionResult:
    sd1 = structure_data(1, 1)
    s_values = (1.5, 2.0, 2.5, 3.0 + 0.5j) if profile == "full" else (2.0,)
    details = {}
    worst = 0.0
    ok = True
    for s in s_values:
        rep = poisson.c_s(spectral_param(s, sd1), method="all")
        details["r1_b1_s_%s" % s] = {
            "gk": rep.cs_gk, "fatou": rep.cs_fatou, "direct": rep.cs_direct,
            "max_pairwise_rel_err": rep.max_pairwise_rel_err,
        }
        worst = max(worst, rep.max_pairwise_rel_err)
        ok = ok and rep.max_pairwise_rel_err <= 1e-3
    sd2 = structure_data(2, 1)
    sp2 = spectral_param(4.0, sd2)
    samples = 10 ** 6 if profile == "full" else 2 * 10 ** 5
    rule = boundary.stiefel_rule(sd2, samples=samples, seed=seed + 40)
    gk = poisson.c_s(sp2, method="gk")
    fat = poisson.c_s(sp2, method="fatou", rule=rule)
    rel2 = abs(gk - fat) / abs(gk)
    details["r2_b1_s_4"] = {"gk": gk, "fatou": fat, "rel_err": rel2, "samples": samples}
    ok = ok and rel2 <= 1e-2
    return CriterionResult(6, "cs-triple", ok, worst, 1e-3, 300.0, details=details)


# ---------------------------------------------------------------------------
# 7. Fatou boundary recovery plus the inadmissible negative control
# ---------------------------------------------------------------------------

def criterion_fatou(seed: int = 7, profile: str = "full") -> CriterionResult:
    sd = structure_data(1, 1)
    level = 6 if profile == "full" else 5
    t_max = 6.0 if profile == "full" else 5.0
    rule = boundary.sphere_rule(sd, level=level)
    sp = spectral_param(2.5, sd)
    f = ktypes.random_band_limited(sd, seed=seed + 90, max_p=2, max_q=2, translates=1)
    t_grid = np.arange(0.0, t_max + 1e-9, 0.5)
    prof = fatou.radial_profile(sp, f, rule.nodes, t_grid, rule)
    rep = fatou.boundary_limit(sp, prof, reference=f, p=2.0, rule=rule)
    details = {"r1_b1": {"sup_err": rep.sup_err, "l2_err": rep.lp_err,
                         "t_max": t_max, "nodes": len(rule)}}
    ok = bool(np.all(rep.converged)) and rep.sup_err <= 1e-2
    worst = rep.sup_err

    # negative control: inadmissible s must be reported as non-convergent
    sp_bad = spectral_param(-0.5, sd)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        zprof = fatou.zonal_profile(sp_bad, np.arange(0.0, 8.01, 0.5))
    try:
        fatou.boundary_limit(sp_bad, zprof)
        control = False
    except ConvergenceError as exc:
        control = True
        details["negative_control"] = {"reported": str(exc)[:120]}
    ok = ok and control

    if profile == "full":
        sd2 = structure_data(2, 1)
        sp2 = spectral_param(4.0, sd2)
        rule2 = boundary.stiefel_rule(sd2, samples=10 ** 5, seed=seed + 91)
        rng = np.random.default_rng(seed + 92)
        C = rng.normal(size=(sd2.q, sd2.r)) + 1j * rng.normal(size=(sd2.q, sd2.r))
        C /= np.linalg.norm(C)

        def f2(U):
            tr = np.einsum("...ij,ji->...", np.asarray(U, dtype=complex), C)
            return 1.0 + tr + 0.25 * np.conj(tr)

        t2 = np.arange(0.0, 4.01, 0.5)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            prof2 = fatou.radial_profile(sp2, f2, rule2.nodes[:160], t2, rule2)
        rep2 = fatou.boundary_limit(sp2, prof2, reference=f2, p=2.0, rule=rule2)
        details["r2_b1"] = {"l2_err": rep2.lp_err, "sup_err": rep2.sup_err,
                            "t_max": 4.0, "nodes": 160}
        ok = ok and bool(np.all(rep2.converged)) and rep2.lp_err <= 5e-2
        worst = max(worst, rep2.lp_err)
    return CriterionResult(7, "fatou-recovery", ok, worst, 1e-2, 600.0, details=details)


# ---------------------------------------------------------------------------
# 8. L1 domination of the renormalized kernel family
# ---------------------------------------------------------------------------

def criterion_domination(seed: int = 7, profile: str = "full") -> CriterionResult:
    sd = structure_data(1, 1)
    chart = boundary.heisenberg_chart(sd, grid=2)
    t_list = (0.5, 1.0, 2.0, 4.0)
    details = {"chart_nodes": len(chart)}
    ok = len(chart) >= 1000
    worst = 0.0
    for s in (1.5, 3.0):
        rep = fatou.domination_check(spectral_param(s, sd), t_list, chart)
        details["s_%s" % s] = {
            "branch": rep.branch, "violations": rep.violations,
            "max_excess": rep.max_excess, "phi_integral": rep.phi_integral,
        }
        ok = ok and rep.ok
        worst = max(worst, rep.max_excess)
    return CriterionResult(8, "domination", ok, worst, 1e-10, 60.0, details=details)


# ---------------------------------------------------------------------------
# 9. norm sandwich
# ---------------------------------------------------------------------------

def criterion_sandwich(seed: int = 7, profile: str = "full") -> CriterionResult:
    sd = structure_data(1, 1)
    rule = boundary.sphere_rule(sd, level=6)
    t_grid = np.linspace(0.0, 5.0, 6)
    n_f = 20 if profile == "full" else 2
    p_list = (1.5, 2.0, 4.0) if profile == "full" else (2.0,)
    s_values = (2.0, 2.5) if profile == "full" else (2.0,)
    fs = [ktypes.random_band_limited(sd, seed=seed + 500 + 7 * j, max_p=2, max_q=2,
                                     translates=1) for j in range(n_f)]
    details = {}
    ok = True
    worst = 0.0
    for s in s_values:
        sp = spectral_param(s, sd)
        reps = fatou.norm_sandwich(sp, p_list, fs, t_grid, rule)
        for rep in reps:
            lo = np.asarray(rep.f_norms) * rep.cs_abs / np.asarray(rep.hardy_norms)
            hi = np.asarray(rep.hardy_norms) / (rep.gamma * np.asarray(rep.f_norms))
            slack_used = float(max(np.max(lo), np.max(hi)) - 1.0)
            details["s_%s_p_%s" % (s, rep.p)] = {
                "all_ok": rep.all_ok, "gamma": rep.gamma, "cs_abs": rep.cs_abs,
                "max_slack_used": slack_used,
            }
            ok = ok and rep.all_ok
            worst = max(worst, slack_used)
    return CriterionResult(9, "norm-sandwich", ok, worst, 0.02, 300.0, details=details)


# ---------------------------------------------------------------------------
# 10. Schur diagonality and the coefficient form of the Hardy norm
# ---------------------------------------------------------------------------

def criterion_schur_l2(seed: int = 7, profile: str = "full") -> CriterionResult:
    sd = structure_data(1, 1)
    rule = boundary.sphere_rule(sd, level=6)
    sp = spectral_param(2.5, sd)
    max_pq = 3 if profile == "full" else 2
    deltas = ktypes.ktype_range(max_pq, max_pq)
    details = {}
    worst_cv = 0.0
    ok = True
    for i, d in enumerate(deltas):
        rep = ktypes.schur_diagonality(sp, d, 1.0, rule.nodes, rule, seed=seed + 11 + i)
        worst_cv = max(worst_cv, rep.cv)
        ok = ok and rep.cv <= 1e-3 and rep.ratio_matches_phi
        details["delta_%d_%d" % (d.p, d.q)] = {
            "cv": rep.cv, "ratio": rep.ratio_mean, "phi": rep.phi_reference,
        }
    # coefficient-based Hardy norm vs the direct quadrature norm
    rng = np.random.default_rng(seed + 1000)
    coeffs = {}
    for d in deltas:
        coeffs[d] = complex(rng.normal(), rng.normal())
    norm = np.sqrt(sum(abs(a) ** 2 for a in coeffs.values()))
    coeffs = {d: a / norm for d, a in coeffs.items()}
    f = ktypes.band_limited(coeffs, sd)
    t_grid = np.linspace(0.0, 5.0, 6)
    growth = float(np.real(sp.growth))
    profiles = {d: ktypes.spherical_profile(sp, d, t_grid, rule).values for d in deltas}
    slice_sq = np.zeros(len(t_grid))
    for d, a in coeffs.items():
        slice_sq += abs(a) ** 2 * np.abs(profiles[d]) ** 2
    hn_coeff = float(np.max(np.exp(-growth * t_grid) * np.sqrt(slice_sq)))
    hn_direct = poisson.hardy_norm(poisson.poisson_lift(sp, f, rule), sp, 2.0, t_grid, rule)
    rel = abs(hn_coeff - hn_direct) / hn_direct
    details["hardy_norm"] = {"coefficient_form": hn_coeff, "direct": hn_direct,
                             "rel_err": rel}
    ok = ok and rel <= 1e-2
    return CriterionResult(10, "schur-l2", ok, worst_cv, 1e-3, 300.0, details=details)


# ---------------------------------------------------------------------------
# 11. L2 inversion round trip
# ---------------------------------------------------------------------------

def criterion_inversion(seed: int = 7, profile: str = "full") -> CriterionResult:
    sd = structure_data(1, 1)
    level = 6 if profile == "full" else 5
    rule = boundary.sphere_rule(sd, level=level)
    sp = spectral_param(2.0, sd)
    n_f = 5 if profile == "full" else 1
    t_list = (3.0, 4.0, 5.0) if profile == "full" else (3.0, 4.0)
    details = {}
    ok = True
    worst = 0.0
    for k in range(n_f):
        f = ktypes.random_band_limited(sd, seed=seed + 300 + k, max_p=2, max_q=2,
                                       translates=1)
        F = poisson.poisson_lift(sp, f, rule)
        fv = f(rule.nodes)
        fn = float(np.sqrt(np.sum(rule.weights * np.abs(fv) ** 2)))
        errs = []
        for t in t_list:
            g = fatou.invert_l2(sp, F, t, rule)
            gv = g(rule.nodes)
            errs.append(float(np.sqrt(np.sum(rule.weights * np.abs(gv - fv) ** 2)) / fn))
        decreasing = all(errs[i] > errs[i + 1] for i in range(len(errs) - 1))
        details["f_%d" % k] = {"errors": errs, "decreasing": decreasing}
        ok = ok and decreasing and errs[-1] <= 5e-2
        worst = max(worst, errs[-1])
    return CriterionResult(11, "inversion-roundtrip", ok, worst, 5e-2, 300.0,
                           details=details)


# ---------------------------------------------------------------------------
# 12. determinism of the suite artifacts
# ---------------------------------------------------------------------------

def _run_suite_subprocess(seed: int, criteria: str, out_dir: str) -> dict:
    cmd = [sys.executable, "-m", "matrixball", "suite", "--profile", "quick",
           "--seed", str(seed), "--criteria", criteria, "--out", out_dir]
    env = dict(os.environ)
    env.setdefault("MATRIXBALL_WORKERS", "1")
    proc = subprocess.run(cmd, capture_output=True, text=True, env=env)
    if proc.returncode not in (0, 1):
        raise RuntimeError("suite subprocess failed (%d): %s" % (proc.returncode,
                                                                 proc.stderr[-500:]))
    digests = {}
    for name in sorted(os.listdir(out_dir)):
        with open(os.path.join(out_dir, name), "rb") as fh:
            digests[name] = hashlib.sha256(fh.read()).hexdigest()
    return digests


def criterion_determinism(seed: int = 7, profile: str = "full") -> CriterionResult:
    criteria = "1,2,3,6,8" if profile == "full" else "1,3,8"
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "run")  # identical command, run twice
        d1 = _run_suite_subprocess(seed, criteria, out)
        d2 = _run_suite_subprocess(seed, criteria, out)
    same = d1 == d2 and len(d1) > 0
    details = {"criteria_rerun": criteria, "files": sorted(d1),
               "digests_run1": d1, "digests_run2": d2}
    return CriterionResult(12, "determinism", same, 0.0 if same else 1.0, 0.0, 2700.0,
                           details=details)


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

CRITERIA = {
    1: criterion_structure,
    2: criterion_cocycle,
    3: criterion_kernel_form,
    4: criterion_hua,
    5: criterion_third_order,
    6: criterion_cs,
    7: criterion_fatou,
    8: criterion_domination,
    9: criterion_sandwich,
    10: criterion_schur_l2,
    11: criterion_inversion,
    12: criterion_determinism,
}


def run_criterion(index: int, seed: int = 7, profile: str = "full") -> CriterionResult:
    t0 = time.time()
    res = CRITERIA[index](seed=seed, profile=profile)
    res.elapsed_s = time.time() - t0
    return res


def run_all(seed: int = 7, profile: str = "full", criteria=None, log=None):
    """Run the requested criteria in order, returning CriterionResult objects."""
    indices = sorted(criteria) if criteria else sorted(CRITERIA)
    results = []
    for idx in indices:
        res = run_criterion(idx, seed=seed, profile=profile)
        results.append(res)
        if log is not None:
            log(res.line())
    return results


def results_json(results, seed: int, profile: str, config: dict | None = None) -> str:
    payload = {
        "version": __version__,
        "seed": seed,
        "profile": profile,
        "config": _sanitize(config or {}),
        "all_passed": bool(all(r.passed for r in results)),
        "results": [
            {
                "index": r.index,
                "name": r.name,
                "passed": bool(r.passed),
                "worst": float(r.worst),
                "tol": float(r.tol),
                "budget_s": float(r.budget_s),
                "details": _sanitize(r.details),
            }
            for r in results
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def results_csv(results, seed: int, profile: str, config: dict | None = None) -> str:
    lines = [
        "# matrixball %s" % __version__,
        "# config: %s" % json.dumps(_sanitize(config or {}), sort_keys=True),
        "# seed: %d  profile: %s" % (seed, profile),
        "# wall-time: excluded from artifacts so reruns are byte-identical",
        "index,name,passed,worst,tol,budget_s",
    ]
    for r in results:
        lines.append("%d,%s,%d,%r,%r,%r" % (r.index, r.name, int(r.passed),
                                            float(r.worst), float(r.tol),
                                            float(r.budget_s)))
    return "\n".join(lines) + "\n"
