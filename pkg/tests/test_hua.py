"""Left-invariant derivatives, the Hua system, and third-order operators."""

import math

import numpy as np
import pytest

from matrixball import _kernels, group, hua
from matrixball.structure import spectral_param, structure_data


def radial_generator(sd):
    X0 = np.zeros((sd.m, sd.m), dtype=np.complex128)
    for j in range(sd.r):
        X0[j, sd.r + j] = 1.0
        X0[sd.r + j, j] = 1.0
    return X0


def h1_func(sd):
    return lambda G: _kernels.h1_batch(np.asarray(G, dtype=np.complex128), sd.r)


def test_lie_derivative_constant(sd11):
    X0 = radial_generator(sd11)
    one = lambda G: np.ones(G.shape[0], dtype=np.complex128)
    e = np.eye(3, dtype=np.complex128)
    for dirs in ((X0,), (X0, X0), (X0, X0, X0)):
        assert abs(hua.lie_derivative(one, e, dirs, sd=sd11)) < 1e-9


def test_lie_derivative_height(sd11):
    # h1(g exp(u X0)) = h1(g) + u along the radial line
    X0 = radial_generator(sd11)
    F = h1_func(sd11)
    for g in (np.eye(3, dtype=np.complex128), group.radial(0.7, sd11)):
        d1 = hua.lie_derivative(F, g, (X0,), sd=sd11)
        assert abs(d1 - 1.0) < 1e-9
    # second and third derivatives of powers of the height at the identity
    e = np.eye(3, dtype=np.complex128)
    F2 = lambda G: h1_func(sd11)(G) ** 2
    F3 = lambda G: h1_func(sd11)(G) ** 3
    assert abs(hua.lie_derivative(F2, e, (X0, X0), sd=sd11) - 2.0) < 1e-8
    assert abs(hua.lie_derivative(F3, e, (X0, X0, X0), sd=sd11) - 6.0) < 1e-6


def test_lie_derivative_linearity(sd11):
    X0 = radial_generator(sd11)
    g = group.random_group_element(3, 0.3, sd11)
    F = h1_func(sd11)
    G2 = lambda G: np.exp(h1_func(sd11)(G))
    combo = lambda G: 2.0 * F(G) - 0.5j * G2(G)
    a = hua.lie_derivative(F, g, (X0,), sd=sd11)
    b = hua.lie_derivative(G2, g, (X0,), sd=sd11)
    c = hua.lie_derivative(combo, g, (X0,), sd=sd11)
    assert abs(c - (2.0 * a - 0.5j * b)) < 1e-9


def test_calibration_scales():
    for r, b in ((1, 1), (2, 1)):
        basis, report = hua.calibrate_pairing(r, b)
        m = 2 * r + b
        assert abs(report.rescale - 2 * m) < 1e-6
        assert abs(report.dual_scale_final - 1.0) < 1e-8
        # the raw fit is scale-dependent but its shape is not:
        # beta / alpha = -(r + b)^2 gives the eigenvalue (s^2 - (r+b)^2)/4
        assert abs(report.beta / report.alpha + (r + b) ** 2) < 1e-6
        assert report.beta_consistent
        basis.validate()


@pytest.mark.parametrize("r,b,s", [(1, 1, 3.0), (1, 1, 4 + 1j), (2, 1, 4.0)])
def test_hua_eigen_residual(r, b, s):
    sd = structure_data(r, b)
    sp = spectral_param(s, sd)
    basis = hua.hua_basis(sd)
    for g, U in hua._sample_pairs(sd, 2, seed=31):
        assert hua.eigen_residual(sp, g, U, basis) < 1e-6


def test_harmonic_kernel_annihilated(sd11):
    # s = r + b puts the kernel in the kernel of the Hua operator
    sp = spectral_param(float(sd11.r + sd11.b), sd11)
    assert abs(sp.hua_eigenvalue) < 1e-14
    basis = hua.hua_basis(sd11)
    for g, U in hua._sample_pairs(sd11, 2, seed=5):
        F = hua.lift_kernel(sp, U)
        H = hua.hua_second(F, g, basis)
        Fg = complex(F(g[None])[0])
        assert np.max(np.abs(H)) / abs(Fg) < 1e-5


def test_fd_order_slopes(sd11):
    basis = hua.hua_basis(sd11)
    sp = spectral_param(3.0, sd11)
    assert abs(hua.measure_fd_order(sp, basis, order=4) - 4.0) < 0.3
    assert abs(hua.measure_fd_order(sp, basis, order=2) - 2.0) < 0.3


def third_ratio_at(sp, g, U, basis):
    F = hua.lift_kernel(sp, U)
    TU = hua.hua_third_U(F, g, basis)
    TW = hua.hua_third_W(F, g, basis)
    sd = sp.sd
    # both outputs live on the p+ block
    for T in (TU, TW):
        peak = np.max(np.abs(T))
        off = T.copy()
        off[: sd.r, sd.r :] = 0.0
        assert np.max(np.abs(off)) < 1e-9 * peak
    blkU = TU[: sd.r, sd.r :].ravel()
    blkW = TW[: sd.r, sd.r :].ravel()
    k = int(np.argmax(np.abs(blkW)))
    return blkU[k] / blkW[k]


def test_third_order_frozen_ratios(sd11):
    # exact rational law at (1, 1): ratio(s) = (s^2 - 4) / (s^2 - 16)
    basis = hua.hua_basis(sd11)
    g, U = hua._sample_pairs(sd11, 1, seed=19)[0]
    for s, want in ((3.5, -11.0 / 5.0), (9.0, 77.0 / 65.0)):
        got = third_ratio_at(spectral_param(s, sd11), g, U, basis)
        assert abs(got - want) / abs(want) < 1e-6


def test_third_order_basis_independence(sd11):
    basis = hua.hua_basis(sd11)
    rng = np.random.default_rng(12)
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert abs(np.linalg.det(A)) > 0.1
    mixed = hua.remix_basis(basis, A)
    g, U = hua._sample_pairs(sd11, 1, seed=8)[0]
    sp = spectral_param(3.0, sd11)
    F = hua.lift_kernel(sp, U)
    H0 = hua.hua_second(F, g, basis)
    H1 = hua.hua_second(F, g, mixed)
    assert np.max(np.abs(H0 - H1)) < 1e-8 * max(1.0, np.max(np.abs(H0)))
    r0 = third_ratio_at(sp, g, U, basis)
    r1 = third_ratio_at(sp, g, U, mixed)
    assert abs(r0 - r1) < 1e-6 * abs(r0)


def test_third_order_report(sd11):
    sps = [spectral_param(s, sd11) for s in (2.4, 3.2, 4.4, 5.2)]
    rep = hua.third_order_ratio(sps, samples=3, seed=77)
    assert max(rep.cvs) < 1e-6
    assert rep.c_rel_err < 1e-3
    assert abs(rep.c_fit - 6.0) < 1e-2
    assert abs(rep.p_fit - 2.0) < 1e-2
    assert abs(rep.d_fit - 4.0) < 1e-2
    assert abs(rep.p_denominator - 3.0) < 1e-2
    assert rep.genus_candidate == 3
    assert rep.fit_residual < 1e-6
