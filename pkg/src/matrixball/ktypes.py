"""Rank-one K-type machinery: disk polynomials, projections, Phi_{s,delta}.

L^2 of the sphere S^(2b+1) splits into bidegree-(p, q) harmonics V_(p,q); the
zonal representative of V_(p,q) as a function of the first coordinate is the
disk polynomial

    R_(p,q)(u) = u^(p-q) * P_k^(b-1, |p-q|)(2|u|^2 - 1) / binom(k + b - 1, k)

with k = min(p, q) (conj(u) powers when q > p), normalized so R(1) = 1. The
generalized spherical profile Phi_{s,delta}(a_t) is the Poisson transform of
the zonal function evaluated on the radial flow, and Schur diagonality says
P_s f(k a_t . 0) = Phi_{s,delta}(a_t) f(k) for any f in V_delta.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, boundary, poisson
from .boundary import QuadratureRule
from .errors import DomainError
from .structure import SpectralParam, StructureData

__all__ = [
    "KTypeIndex",
    "SphericalProfile",
    "SchurReport",
    "ktype_range",
    "zonal",
    "zonal_function",
    "zonal_norm",
    "project_ktype",
    "ktype_spectrum",
    "phi_s_delta",
    "spherical_profile",
    "schur_diagonality",
    "band_limited",
    "random_band_limited",
]


@dataclass(frozen=True)
class KTypeIndex:
    """Bidegree of a K-type on the sphere in C^(1+b)."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise DomainError("K-type bidegree must be non-negative")

    @property
    def order(self):
        return (self.p + self.q, self.p)


@dataclass
class SphericalProfile:
    delta: KTypeIndex
    t_grid: np.ndarray
    values: np.ndarray  # Phi_{s,delta}(a_t) per grid point


@dataclass
class SchurReport:
    delta: KTypeIndex
    t: float
    ratio_mean: complex
    cv: float
    phi_reference: complex
    n_used: int

    @property
    def ratio_matches_phi(self) -> bool:
        return abs(self.ratio_mean - self.phi_reference) <= 1e-6 + 5e-2 * abs(self.phi_reference)


def ktype_range(max_p: int, max_q: int):
    """All bidegrees with p <= max_p, q <= max_q, ordered by p+q then p."""
    out = [KTypeIndex(p, q) for p in range(max_p + 1) for q in range(max_q + 1)]
    return sorted(out, key=lambda d: d.order)


def zonal(delta: KTypeIndex, u, b: int):
    """Disk polynomial R_(p,q) at u (vectorized), normalized R(1) = 1."""
    u = np.asarray(u, dtype=np.complex128)
    p, q = delta.p, delta.q
    k, d = min(p, q), abs(p - q)
    alpha = b - 1
    x = 2.0 * (u.real**2 + u.imag**2) - 1.0
    jac = _kernels.jacobi_batch(k, float(alpha), float(d), x)
    jac = jac / math.comb(k + alpha, k)
    ang = u**(p - q) if p >= q else np.conj(u) ** (q - p)
    return jac * ang


def zonal_function(delta: KTypeIndex, sd: StructureData) -> poisson.BoundaryFunction:
    """phi_delta as a boundary function: the disk polynomial of U_1."""
    if sd.r != 1:
        raise DomainError("K-type machinery is rank-one only")

    def ev(U: np.ndarray) -> np.ndarray:
        return zonal(delta, U[..., 0, 0], sd.b)

    return poisson.BoundaryFunction(
        evaluator=ev,
        description="zonal (%d,%d)" % (delta.p, delta.q),
        ktype_coefficients={delta: 1.0},
    )


_NORM_CACHE: dict = {}


def zonal_norm(delta: KTypeIndex, b: int) -> float:
    """L^2(S) norm of the zonal function phi_delta (cached quadrature)."""
    key = (delta.p, delta.q, b)
    if key not in _NORM_CACHE:
        from .structure import structure_data

        sd = structure_data(1, b)
        level = max(24, delta.p + delta.q + 2)
        rule = boundary.disk_rule(sd, level=level)
        vals = zonal(delta, rule.nodes, b)
        _NORM_CACHE[key] = float(np.sqrt(np.real(np.dot(rule.weights, np.abs(vals) ** 2))))
    return _NORM_CACHE[key]


def project_ktype(f, delta: KTypeIndex, rule: QuadratureRule) -> complex:
    """Coefficient of f against the L^2-normalized zonal of V_delta."""
    b = rule.nodes.shape[-1] - 1
    ev = poisson._as_evaluator(f)
    fv = ev(rule.nodes)
    zv = zonal(delta, rule.nodes[..., 0, 0], b)
    return complex(np.dot(rule.weights, fv * np.conj(zv))) / zonal_norm(delta, b)


def ktype_spectrum(f, max_p: int, max_q: int, rule: QuadratureRule, warn_defect: float = 0.05):
    """All zonal coefficients up to (max_p, max_q) plus the Parseval defect."""
    b = rule.nodes.shape[-1] - 1
    ev = poisson._as_evaluator(f)
    fv = ev(rule.nodes)
    total = float(np.real(np.dot(rule.weights, np.abs(fv) ** 2)))
    coeffs = {}
    for delta in ktype_range(max_p, max_q):
        zv = zonal(delta, rule.nodes[..., 0, 0], b)
        coeffs[delta] = complex(np.dot(rule.weights, fv * np.conj(zv))) / zonal_norm(delta, b)
    captured = sum(abs(c) ** 2 for c in coeffs.values())
    defect = abs(total - captured) / total if total > 0 else 0.0
    if defect > warn_defect:
        warnings.warn(
            "K-type expansion up to (%d,%d) misses %.1f%% of ||f||^2 "
            "(f has non-zonal or higher components)" % (max_p, max_q, 100 * defect),
            stacklevel=2,
        )
    return coeffs, defect


def phi_s_delta(sp: SpectralParam, delta: KTypeIndex, t: float, rule: QuadratureRule) -> complex:
    """Phi_{s,delta}(a_t): the transform of the zonal function at a_t . 0."""
    f = zonal_function(delta, sp.sd)
    return complex(poisson.transform_radial(sp, f, None, t, rule))


def spherical_profile(sp: SpectralParam, delta: KTypeIndex, t_grid, rule: QuadratureRule) -> SphericalProfile:
    t_grid = np.asarray(t_grid, dtype=float)
    vals = np.array([phi_s_delta(sp, delta, float(t), rule) for t in t_grid])
    return SphericalProfile(delta=delta, t_grid=t_grid, values=vals)


def _random_unitary(q: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
    from .linalg import qr_unitary

    Q, _ = qr_unitary(G)
    return Q


def schur_diagonality(
    sp: SpectralParam,
    delta: KTypeIndex,
    t: float,
    nodes: np.ndarray,
    rule: QuadratureRule,
    seed: int = 11,
) -> SchurReport:
    """Constancy of P_s f(k a_t . 0) / f(k) over k for a translated zonal f.

    The translate keeps f inside V_delta, so the ratio must be the Schur
    scalar Phi_{s,delta}(a_t) wherever f is bounded away from zero.
    """
    sd = sp.sd
    M0 = _random_unitary(sd.q, seed)

    def ev(U: np.ndarray) -> np.ndarray:
        W = U @ M0
        return zonal(delta, W[..., 0, 0], sd.b)

    f = poisson.BoundaryFunction(ev, "translated zonal (%d,%d)" % (delta.p, delta.q))
    fv = ev(nodes)
    Fv = poisson.transform_radial(sp, f, nodes, t, rule)
    mask = np.abs(fv) > 0.1 * np.max(np.abs(fv))
    ratios = Fv[mask] / fv[mask]
    mean = complex(np.mean(ratios))
    cv = float(np.std(ratios) / max(abs(mean), 1e-300))
    ref = phi_s_delta(sp, delta, t, rule)
    return SchurReport(
        delta=delta, t=t, ratio_mean=mean, cv=cv, phi_reference=ref, n_used=int(mask.sum())
    )


def band_limited(coeffs: dict, sd: StructureData) -> poisson.BoundaryFunction:
    """f = sum a_delta * (zonal_delta / ||zonal_delta||): ||f||_2^2 = sum |a|^2."""
    if sd.r != 1:
        raise DomainError("band-limited builders are rank-one only")
    items = [(d, complex(a) / zonal_norm(d, sd.b)) for d, a in coeffs.items()]

    def ev(U: np.ndarray) -> np.ndarray:
        u = U[..., 0, 0]
        out = np.zeros(u.shape, dtype=np.complex128)
        for d, a in items:
            out = out + a * zonal(d, u, sd.b)
        return out

    desc = "band-limited " + ",".join("(%d,%d)" % (d.p, d.q) for d, _ in items)
    return poisson.BoundaryFunction(ev, desc, ktype_coefficients=dict(coeffs))


def random_band_limited(
    sd: StructureData, seed: int, max_p: int = 3, max_q: int = 3, translates: int = 0
) -> poisson.BoundaryFunction:
    """Seeded random combination of normalized zonals, optionally K-translated.

    With translates > 0 the function mixes rotated copies (still band-limited
    with the same bidegree bound, but with non-zonal components), which is the
    honest test family for norm inequalities.
    """
    rng = np.random.default_rng(seed)
    deltas = ktype_range(max_p, max_q)
    amps = rng.normal(size=len(deltas)) + 1j * rng.normal(size=len(deltas))
    amps /= np.linalg.norm(amps)
    base = band_limited({d: a for d, a in zip(deltas, amps)}, sd)
    if translates == 0:
        return base
    rots = [_random_unitary(sd.q, seed + 101 + j) for j in range(translates)]
    mix = rng.normal(size=translates + 1)
    mix /= np.linalg.norm(mix)

    def ev(U: np.ndarray) -> np.ndarray:
        out = mix[0] * base.evaluator(U)
        for c, R in zip(mix[1:], rots):
            out = out + c * base.evaluator(U @ R)
        return out

    return poisson.BoundaryFunction(
        ev, "band-limited with %d translates" % translates, ktype_coefficients=None
    )
