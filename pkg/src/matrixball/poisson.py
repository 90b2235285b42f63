"""Poisson kernel and transform on the matrix ball, and the constant c_s.

The kernel against a Shilov point U at an interior point Z is

    K_s(Z, U) = [ det(I - Z Z^H) / |det(I - Z U^H)|^2 ]^((s r + n) / (2 r))

and the transform of a boundary function f is P_s f(Z) = int_S K_s(Z, U) f(U) dU.

Radial evaluation uses the pushforward form: with k a boundary rotation and
a_t the radial flow,

    P_s f(k a_t . 0) = int_S |det(cosh t I + sinh t V_1)|^(s - n/r) f(k . (a_t . V)) dV

where V_1 is the leading r x r block of the integration node V and k acts
linearly on Shilov points. This keeps quadrature nodes spread over the whole
boundary instead of collapsing toward the image of a_t, so deep t stays
numerically tame.

c_s is computed three independent ways: a closed-form Gamma product, the
renormalized limit of the radial profile of P_s 1 (Richardson-accelerated with
the known correction exponents), and for rank one a direct integral over the
opposite unipotent group.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import loggamma

from . import _kernels, boundary, group
from .boundary import QuadratureRule
from .errors import AdmissibilityError, ConvergenceError, DegeneracyError, MembershipError
from .structure import SpectralParam, lambda_coefficients

__all__ = [
    "BoundaryFunction",
    "CsReport",
    "kernel",
    "transform",
    "transform_radial",
    "poisson_lift",
    "phi_s",
    "c_s",
    "hardy_profile",
    "hardy_norm",
    "gamma_estimate",
]

BOUNDARY_DEGENERACY_TOL = 1e-13
DYNAMIC_RANGE_WARN = 1e12


@dataclass
class BoundaryFunction:
    """Vectorized function on Shilov points: evaluator maps (N, r, q) -> (N,)."""

    evaluator: Callable
    description: str = ""
    ktype_coefficients: dict | None = None

    def __call__(self, U: np.ndarray) -> np.ndarray:
        return self.evaluator(U)

    @staticmethod
    def constant(value=1.0) -> "BoundaryFunction":
        c = complex(value)
        return BoundaryFunction(
            evaluator=lambda U: np.full(U.shape[:-2], c),
            description="constant %s" % value,
        )


@dataclass
class CsReport:
    """The constant c_s by independent routes, with their spread."""

    s: complex
    cs_gk: complex
    cs_fatou: complex
    cs_direct: complex | None
    max_pairwise_rel_err: float


def _as_evaluator(f):
    if isinstance(f, BoundaryFunction):
        return f.evaluator
    if callable(f):
        return f
    return BoundaryFunction.constant(f).evaluator


def _require_admissible(sp: SpectralParam):
    if not sp.admissible:
        raise AdmissibilityError(
            "s = %s is not admissible: need Re(s) > %g" % (sp.s, sp.sd.admissibility_threshold)
        )


def kernel(sp: SpectralParam, Z: np.ndarray, U: np.ndarray):
    """Poisson kernel K_s(Z, U); U may carry leading batch dimensions."""
    sd = sp.sd
    Z = np.asarray(Z, dtype=np.complex128)
    U = np.asarray(U, dtype=np.complex128)
    if Z.shape != (sd.r, sd.q):
        raise MembershipError("Z must be an r x q matrix, got %s" % (Z.shape,))
    if not group.is_domain_point(Z):
        raise MembershipError("Z must lie in the open matrix ball (I - Z Z^H > 0)")
    if not group.is_shilov_point(U, tol=1e-8):
        raise MembershipError("U must satisfy U U^H = I")
    base = _kernels.logdet_ipzz(Z[None])[0]
    cross = _kernels.cross_logabsdet(Z[None], U.reshape(-1, sd.r, sd.q))[0]
    if np.any(np.exp(2.0 * cross) < BOUNDARY_DEGENERACY_TOL):
        raise DegeneracyError("det(I - Z U^H) is numerically degenerate")
    vals = np.exp(sp.sigma * (base - 2.0 * cross)).reshape(U.shape[:-2])
    return vals if vals.shape else complex(vals)


def transform(sp: SpectralParam, f, Z: np.ndarray, rule: QuadratureRule):
    """Direct quadrature of P_s f at an interior point Z.

    Defined for any s (the kernel is bounded on S for interior Z);
    admissibility only matters for boundary limits, not for the integral.
    """
    sd = sp.sd
    Z = np.asarray(Z, dtype=np.complex128)
    if not group.is_domain_point(Z):
        raise MembershipError("Z must lie in the open matrix ball")
    ev = _as_evaluator(f)
    base = _kernels.logdet_ipzz(Z[None])[0]
    cross = _kernels.cross_logabsdet(Z[None], rule.nodes)[0]
    logk = np.real(sp.sigma) * (base - 2.0 * cross)
    spread = float(np.max(logk) - np.min(logk))
    if spread > math.log(DYNAMIC_RANGE_WARN):
        warnings.warn(
            "Poisson kernel dynamic range exp(%.1f) exceeds 1e12; "
            "consider the radial pushforward evaluation" % spread,
            stacklevel=2,
        )
    vals = np.exp(sp.sigma * (base - 2.0 * cross)) * ev(rule.nodes)
    return complex(np.dot(rule.weights, vals))


def _radial_pushforward(sp: SpectralParam, t: float, rule: QuadratureRule):
    """Pushed nodes a_t . V and complex weights w * |det(..)|^(s - n/r)."""
    sd = sp.sd
    V = rule.nodes
    V1 = V[..., :, : sd.r]
    lw = _kernels.radial_logweight(V1, t)
    cw = rule.weights * np.exp((sp.s - sd.harmonic_s) * lw)
    at = group.radial(t, sd)
    W = _kernels.mobius_batch(at, V, sd.r)
    return W, cw


def transform_radial(sp: SpectralParam, f, centers, t: float, rule: QuadratureRule, chunk: int = 512):
    """P_s f at the points k_U a_t . 0 for a batch of Shilov centers U.

    centers: (N, r, q) Shilov points (or None for the single point a_t . 0).
    Returns a length-N complex array (a scalar when centers is None).
    """
    sd = sp.sd
    ev = _as_evaluator(f)
    W, cw = _radial_pushforward(sp, t, rule)
    if centers is None:
        return complex(np.dot(cw, ev(W)))
    centers = np.asarray(centers, dtype=np.complex128).reshape(-1, sd.r, sd.q)
    M = group.kappa_right_factors(centers)  # (N, q, q), boundary action V -> V M
    out = np.empty(len(centers), dtype=np.complex128)
    step = max(1, min(len(centers), int(chunk)))
    for lo in range(0, len(centers), step):
        hi = min(lo + step, len(centers))
        pushed = np.einsum("mrq,nqp->nmrp", W, M[lo:hi], optimize=True)
        vals = ev(pushed.reshape(-1, sd.r, sd.q)).reshape(hi - lo, len(W))
        out[lo:hi] = vals @ cw
    return out


def poisson_lift(sp: SpectralParam, f, rule: QuadratureRule):
    """The transform as a function on K x A: F(U, t) = P_s f(k_U a_t . 0)."""

    def F(U: np.ndarray, t: float) -> np.ndarray:
        return transform_radial(sp, f, U, t, rule)

    return F


def phi_s(sp: SpectralParam, t: float, rule: QuadratureRule):
    """Spherical-type radial value phi_s(a_t) = P_s 1 (a_t . 0)."""
    sd = sp.sd
    if rule.kind == "deterministic-disk":
        lw = np.log(np.abs(math.cosh(t) + math.sinh(t) * rule.nodes))
    else:
        lw = _kernels.radial_logweight(rule.nodes[..., :, : sd.r], t)
    return complex(np.dot(rule.weights, np.exp((sp.s - sd.harmonic_s) * lw)))


def _phi_profile(sp: SpectralParam, t_grid: np.ndarray, rule: QuadratureRule):
    sd = sp.sd
    if rule.kind == "deterministic-disk":
        u = rule.nodes
        lw_fn = lambda t: np.log(np.abs(math.cosh(t) + math.sinh(t) * u))
    else:
        V1 = rule.nodes[..., :, : sd.r]
        lw_fn = lambda t: _kernels.radial_logweight(V1, t)
    vals = np.empty(len(t_grid), dtype=np.complex128)
    err = np.empty(len(t_grid))
    for i, t in enumerate(t_grid):
        y = np.exp((sp.s - sd.harmonic_s) * lw_fn(float(t)))
        vals[i] = np.dot(rule.weights, y)
        # weighted standard error, meaningful for Monte Carlo rules
        mean = vals[i]
        var = float(np.dot(rule.weights, np.abs(y - mean) ** 2))
        err[i] = math.sqrt(max(var, 0.0) * float(np.sum(rule.weights**2)))
    return vals, err


def _default_radial_rule(sd, t_max: float, seed: int = 20240801, samples: int = 400000):
    if sd.r == 1:
        panels = max(6, int(math.ceil(2.0 * t_max / math.log(2.0))) + 3)
        return boundary.disk_rule(sd, level=18, panels=panels, phases=640)
    return boundary.stiefel_rule(sd, samples=samples, seed=seed)


def _richardson_limit(y: np.ndarray, dt: float, kappas, rel_tol: float):
    """Eliminate known correction exponents from y_k = c + sum A e^(-kappa t_k)."""
    z = np.asarray(y, dtype=complex)
    for kap in kappas:
        if len(z) < 2:
            break
        rho = np.exp(-kap * dt)
        if abs(1.0 - rho) < 1e-6:
            # the correction branch coincides with the limit (harmonic point)
            continue
        z = (z[1:] - rho * z[:-1]) / (1.0 - rho)
    if len(z) < 2:
        raise ConvergenceError("radial grid too short for extrapolation")
    a, c = z[-2], z[-1]
    if abs(c) == 0 or abs(a - c) > rel_tol * abs(c):
        raise ConvergenceError(
            "renormalized radial profile has not converged: "
            "last extrapolants differ by %.2e (tol %.2e)" % (abs(a - c) / max(abs(c), 1e-300), rel_tol)
        )
    return complex(c)


def _cs_gk(sp: SpectralParam) -> complex:
    sd = sp.sd

    def log_prod(s):
        lam = lambda_coefficients(s, sd)
        total = 0.0 + 0.0j
        for j in range(sd.r):
            x = lam[j]
            total += -x * math.log(2.0) + loggamma(x) - 2.0 * loggamma(0.5 * (x + sd.b + 1))
        for j in range(sd.r):
            for k in range(j + 1, sd.r):
                x = 0.5 * (lam[j] + lam[k])
                total += -np.log(np.sqrt(np.pi) * x)
        return total

    return complex(np.exp(log_prod(sp.s) - log_prod(sd.harmonic_s)))


def _cs_fatou(sp: SpectralParam, t_grid=None, rule=None, rel_tol: float = 1e-3) -> complex:
    sd = sp.sd
    if t_grid is None:
        t_grid = np.arange(0.0, 8.01, 0.5) if sd.r == 1 else np.arange(0.0, 8.01, 0.5)
    t_grid = np.asarray(t_grid, dtype=float)
    dts = np.diff(t_grid)
    if len(dts) < 3 or not np.allclose(dts, dts[0], rtol=1e-12, atol=1e-12):
        raise ConvergenceError("fatou extrapolation needs a uniform t grid with >= 4 points")
    dt = float(dts[0])
    if rule is None:
        rule = _default_radial_rule(sd, float(t_grid[-1]))
    vals, errs = _phi_profile(sp, t_grid, rule)
    y = np.exp(-sp.growth * t_grid) * vals
    if rule.kind == "monte-carlo-stiefel":
        rel_noise = float(np.max(errs / np.abs(vals)))
        rel_tol = max(rel_tol, 25.0 * rel_noise)
    kappas = [2.0 * sp.s - 2.0 * sd.harmonic_s, 2.0] if sd.r == 1 else [2.0, 4.0]
    return _richardson_limit(y, dt, kappas, rel_tol)


def _cs_direct(sp: SpectralParam, chart: QuadratureRule | None = None, grid: int = 4) -> complex:
    sd = sp.sd
    if sd.r != 1:
        raise DegeneracyError("direct c_s route uses the rank-one unipotent chart")
    if chart is None:
        chart = boundary.heisenberg_chart(sd, grid=grid)
    h1v = chart.aux["h1"]
    w = chart.weights
    num = np.dot(w, np.exp(-(sp.s + sd.n) * h1v))
    den = np.dot(w, np.exp(-2.0 * sd.n * h1v))
    return complex(num / den)


def c_s(sp: SpectralParam, method: str = "gk", **params):
    """The boundary-limit constant c_s.

    method: "gk" (closed-form Gamma product), "fatou" (renormalized radial
    limit of P_s 1), "direct" (rank-one unipotent chart integral), or "all"
    (every applicable route, returned as a CsReport).
    """
    _require_admissible(sp)
    if method == "gk":
        return _cs_gk(sp)
    if method == "fatou":
        return _cs_fatou(sp, **params)
    if method == "direct":
        return _cs_direct(sp, **params)
    if method == "all":
        gk = _cs_gk(sp)
        fat = _cs_fatou(
            sp, **{k: v for k, v in params.items() if k in ("t_grid", "rule", "rel_tol")}
        )
        direct = None
        vals = [gk, fat]
        if sp.sd.r == 1:
            direct = _cs_direct(
                sp, **{k: v for k, v in params.items() if k in ("chart", "grid")}
            )
            vals.append(direct)
        scale = max(abs(v) for v in vals)
        worst = max(abs(u - v) for u in vals for v in vals) / scale
        return CsReport(
            s=sp.s, cs_gk=gk, cs_fatou=fat, cs_direct=direct, max_pairwise_rel_err=float(worst)
        )
    raise ValueError("unknown c_s method %r" % method)


def hardy_profile(F, sp: SpectralParam, p: float, t_grid, rule: QuadratureRule) -> np.ndarray:
    """Renormalized L^p boundary norms e^(-t(r Re s - n)) ||F(. a_t)||_p."""
    t_grid = np.asarray(t_grid, dtype=float)
    out = np.empty(len(t_grid))
    g = float(np.real(sp.growth))
    for i, t in enumerate(t_grid):
        vals = F(rule.nodes, float(t))
        lp = float(np.dot(rule.weights, np.abs(vals) ** p)) ** (1.0 / p)
        out[i] = math.exp(-g * t) * lp
    return out


def hardy_norm(F, sp: SpectralParam, p: float, t_grid, rule: QuadratureRule) -> float:
    """Hardy-type norm: the sup of the renormalized L^p profile on the grid."""
    return float(np.max(hardy_profile(F, sp, p, t_grid, rule)))


def gamma_estimate(sp: SpectralParam, t_grid, rule: QuadratureRule) -> float:
    """Upper constant in the norm sandwich: sup_t e^(-t(r Re s - n)) ||kernel||_1.

    The L^1 boundary mass of the kernel at radius t equals phi_(Re s)(a_t), so
    this is the renormalized sup of the real-parameter radial profile.
    """
    from .structure import spectral_param

    t_grid = np.asarray(t_grid, dtype=float)
    if 0.0 not in t_grid:
        t_grid = np.concatenate([[0.0], t_grid])
    sp_re = spectral_param(float(np.real(sp.s)), sp.sd)
    _require_admissible(sp_re)
    vals, _ = _phi_profile(sp_re, t_grid, rule)
    return float(np.max(np.exp(-np.real(sp_re.growth) * t_grid) * np.real(vals)))
