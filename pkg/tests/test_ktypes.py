"""Disk polynomials, K-type projections, and Schur diagonality."""

import numpy as np
import pytest

from matrixball import boundary, ktypes, poisson
from matrixball.errors import DomainError
from matrixball.structure import spectral_param, structure_data


def test_zonal_value_at_one():
    for b in (1, 2):
        for p, q in ((0, 0), (1, 0), (2, 1), (2, 2), (3, 3)):
            val = ktypes.zonal(ktypes.KTypeIndex(p, q), np.array([1.0 + 0j]), b)
            assert abs(val[0] - 1.0) < 1e-12


def test_zonal_gram_orthogonality(sd11):
    rule = boundary.disk_rule(sd11, level=24)
    deltas = ktypes.ktype_range(2, 2)
    vals = np.stack([ktypes.zonal(d, rule.nodes, 1) for d in deltas])
    gram = (vals * rule.weights) @ vals.conj().T
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off)) < 1e-12


def test_zonal_norm_closed_form_b1():
    # derived for b = 1: the L^2 mass of R_(p,q) is 1/(p+q+1)
    for p in range(4):
        for q in range(4):
            n2 = ktypes.zonal_norm(ktypes.KTypeIndex(p, q), 1) ** 2
            assert abs(n2 - 1.0 / (p + q + 1)) < 1e-12


def test_projection_recovers_coefficients(sd11, sphere8):
    coeffs = {
        ktypes.KTypeIndex(0, 0): 0.5 + 0.1j,
        ktypes.KTypeIndex(1, 0): -0.3,
        ktypes.KTypeIndex(1, 1): 0.25j,
        ktypes.KTypeIndex(2, 2): 1.0,
    }
    f = ktypes.band_limited(coeffs, sd11)
    for d, a in coeffs.items():
        got = ktypes.project_ktype(f, d, sphere8)
        assert abs(got - a) < 1e-7
    # and an absent K-type projects to zero
    assert abs(ktypes.project_ktype(f, ktypes.KTypeIndex(3, 0), sphere8)) < 1e-7


def test_band_limited_parseval(sd11, sphere8):
    f = ktypes.random_band_limited(sd11, seed=4, max_p=2, max_q=2)
    total = float(np.real(np.dot(sphere8.weights, np.abs(f(sphere8.nodes)) ** 2)))
    want = sum(abs(a) ** 2 for a in f.ktype_coefficients.values())
    assert abs(total - want) < 1e-12
    coeffs, defect = ktypes.ktype_spectrum(f, 2, 2, sphere8)
    assert defect < 1e-12


def test_spectrum_warns_on_missing_mass(sd11, sphere8):
    f = ktypes.random_band_limited(sd11, seed=4, max_p=2, max_q=2, translates=1)
    with pytest.warns(UserWarning, match="misses"):
        ktypes.ktype_spectrum(f, 2, 2, sphere8)


def test_phi_delta_trivial_is_radial_phi(sd11, sphere6):
    sp = spectral_param(2.5, sd11)
    prof = ktypes.spherical_profile(sp, ktypes.KTypeIndex(0, 0), (0.5, 1.5), sphere6)
    for t, got in zip(prof.t_grid, prof.values):
        assert abs(got - poisson.phi_s(sp, float(t), sphere6)) < 1e-10


def test_schur_diagonality(sd11, sphere6):
    sp = spectral_param(2.5, sd11)
    rep = ktypes.schur_diagonality(sp, ktypes.KTypeIndex(1, 1), 1.0,
                                   sphere6.nodes[:200], sphere6, seed=13)
    assert rep.cv < 1e-3
    assert rep.ratio_matches_phi
    assert rep.n_used > 50


def test_ktype_index_guards():
    with pytest.raises(DomainError):
        ktypes.KTypeIndex(-1, 0)
    order = [(d.p + d.q, d.p) for d in ktypes.ktype_range(2, 2)]
    assert order == sorted(order)


def test_rank_one_only(sd21):
    with pytest.raises(DomainError):
        ktypes.zonal_function(ktypes.KTypeIndex(1, 1), sd21)
    with pytest.raises(DomainError):
        ktypes.band_limited({ktypes.KTypeIndex(0, 0): 1.0}, sd21)
