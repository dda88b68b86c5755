"""Structural weight pairs: psi, phi, Lelong numbers, alpha constants."""
import math

import numpy as np
import pytest

from jetmin.errors import BadInputError, DomainError, GreenPoleError
from jetmin.gain import GainFunction
from jetmin.geometry import UNIT_DISC, DomainSpec, MarkedPoint, green_disc
from jetmin.weights import (
    PhiSpec,
    PsiSpec,
    WeightKernel,
    WeightPair,
    alpha_j,
    eval_phi,
    eval_psi,
    lelong_psi,
    sublevel_member,
)


def two_point_pair(a=0.7):
    """Double point at 0 (weight 2, first-order jet) plus simple point at 1/2."""
    marked = (
        MarkedPoint(0.0, green_weight=2.0, jet_order=1, jet_coeff=1.0),
        MarkedPoint(0.5, green_weight=1.0, jet_order=0, jet_coeff=a),
    )
    return WeightPair.standard(marked)


def test_psi_two_point_value():
    w = two_point_pair()
    assert eval_psi(w, 0.9) == pytest.approx(-1.0583495248683743, abs=1e-13)
    assert eval_psi(w, 0.9) == pytest.approx(
        4 * math.log(0.9) + 2 * math.log(0.4 / 0.55), abs=1e-13
    )


def test_psi_single_point_radial():
    w = WeightPair.standard([MarkedPoint(0.0)])
    assert eval_psi(w, math.exp(-1.0)) == pytest.approx(-2.0, abs=1e-14)


def test_psi_negative_everywhere():
    w = two_point_pair()
    rng = np.random.default_rng(7)
    for _ in range(50):
        z = rng.uniform(-0.7, 0.7) + 1j * rng.uniform(-0.7, 0.7)
        if abs(z) < 0.05 or abs(z - 0.5) < 0.05:
            continue
        assert eval_psi(w, z) < 0


def test_psi_pole_and_domain_errors():
    w = two_point_pair()
    with pytest.raises(GreenPoleError):
        eval_psi(w, 0.0)
    with pytest.raises(DomainError):
        eval_psi(w, 1.2)


def test_psi_extra_terms_lower_it():
    pt = MarkedPoint(0.0)
    base = WeightPair.standard([pt])
    extra = WeightPair.standard([pt], extra_psi=((0.3, 1.0),))
    rng = np.random.default_rng(13)
    for _ in range(200):
        z = rng.uniform(-0.8, 0.8) + 1j * rng.uniform(-0.8, 0.8)
        if abs(z) < 1e-3 or abs(z - 0.3) < 1e-3 or abs(z) >= 1:
            continue
        assert eval_psi(extra, z) < eval_psi(base, z)


def test_phi_vanishes_for_matching_divisor():
    w = two_point_pair()
    rng = np.random.default_rng(4)
    for _ in range(40):
        z = rng.uniform(-0.7, 0.7) + 1j * rng.uniform(-0.7, 0.7)
        if abs(z) < 0.05 or abs(z - 0.5) < 0.05:
            continue
        assert eval_phi(w, z) == pytest.approx(0.0, abs=1e-12)


def test_phi_with_harmonic_part():
    # trivial divisor, u = Re z, psi = 2 log|z|
    w = WeightPair.standard([MarkedPoint(0.0)], zeros=(), u_coeffs=(0.0, 1.0))
    assert eval_phi(w, 0.5) == pytest.approx(2.386294361119891, abs=1e-13)


def test_phi_bump_only():
    w = WeightPair.standard([MarkedPoint(0.0)], bump=0.1)
    for z in (0.3, -0.2 + 0.4j, 0.6j):
        assert eval_phi(w, z) == pytest.approx(0.1 * abs(z) ** 2, abs=1e-12)


def test_lelong_numbers():
    w = two_point_pair()
    assert lelong_psi(w, 0) == pytest.approx(2.0)
    assert lelong_psi(w, 1) == pytest.approx(1.0)


def test_lelong_with_extra_charge():
    w = WeightPair.standard([MarkedPoint(0.0)], extra_psi=((0.0, 2.0),))
    assert lelong_psi(w, 0) == pytest.approx(2.0)  # p=1 plus 2/2


def test_alpha_two_point_values():
    w = two_point_pair()
    assert alpha_j(w, 0) == pytest.approx(-math.log(4.0), abs=1e-13)
    assert alpha_j(w, 1) == pytest.approx(-4 * math.log(2.0), abs=1e-13)


def test_alpha_single_point_zero():
    w = WeightPair.standard([MarkedPoint(0.0)])
    assert alpha_j(w, 0) == pytest.approx(0.0, abs=1e-15)


def test_alpha_sees_leading_and_u():
    w = WeightPair.standard(
        [MarkedPoint(0.0)], leading=2.0, u_coeffs=(0.25,), bump=0.0
    )
    assert alpha_j(w, 0) == pytest.approx(2 * math.log(2.0) + 0.5, abs=1e-13)


def test_alpha_infinite_when_order_mismatch():
    marked = (MarkedPoint(0.0, green_weight=2.0, jet_order=1),)
    w = WeightPair.standard(marked, zeros=((0.0, 1),))
    with pytest.raises(BadInputError):
        alpha_j(w, 0)
    w2 = WeightPair.standard(marked, zeros=((0.0, 3),))
    with pytest.raises(BadInputError):
        alpha_j(w2, 0)


def test_weight_pair_validation():
    pt = MarkedPoint(0.0)
    with pytest.raises(BadInputError):
        WeightPair(
            marked=(pt,),
            psi=PsiSpec(green_terms=((0.5, 2.0),)),
            phi=PhiSpec(),
        )  # green term misses the marked point
    with pytest.raises(BadInputError):
        WeightPair(
            marked=(pt,),
            psi=PsiSpec(green_terms=((0.0, 3.0),)),
            phi=PhiSpec(),
        )  # coefficient does not match 2p
    with pytest.raises(BadInputError):
        PsiSpec(green_terms=())
    with pytest.raises(BadInputError):
        PsiSpec(green_terms=((0.0, -1.0),))
    with pytest.raises(BadInputError):
        PhiSpec(leading=0.0)
    with pytest.raises(BadInputError):
        PhiSpec(bump=-0.5)


def test_sublevel_member():
    w = WeightPair.standard([MarkedPoint(0.0)])
    assert sublevel_member(w, 2.0, 0.1)
    assert not sublevel_member(w, 2.0, 0.5)
    assert sublevel_member(two_point_pair(), 10.0, 0.01)
    with pytest.raises(BadInputError):
        sublevel_member(w, -1.0, 0.1)


def test_stencil_laplacian_of_phi_plus_psi():
    # away from the divisor, phi + psi is harmonic plus the bump term
    w = WeightPair.standard([MarkedPoint(0.0)], bump=0.1, u_coeffs=(0.0, 0.0, 0.3))
    h = 1e-3

    def f(z):
        return eval_phi(w, z) + eval_psi(w, z)

    for z in (0.3 + 0.2j, -0.4j, 0.15 - 0.5j):
        lap = (f(z + h) + f(z - h) + f(z + 1j * h) + f(z - 1j * h) - 4 * f(z)) / h**2
        assert lap == pytest.approx(0.4, abs=1e-3)


def test_kernel_matches_scalar_evaluators_identity_domain():
    w = two_point_pair()
    k = WeightKernel(UNIT_DISC, w)
    rng = np.random.default_rng(17)
    zs = rng.uniform(-0.6, 0.6, 30) + 1j * rng.uniform(-0.6, 0.6, 30)
    zs = zs[(np.abs(zs) > 0.05) & (np.abs(zs - 0.5) > 0.05)]
    psi_vec = k.psi(zs)
    tot_vec = k.phi_plus_psi(zs)
    for z, pv, tv in zip(zs, psi_vec, tot_vec):
        assert pv == pytest.approx(eval_psi(w, z), abs=1e-12)
        assert tv == pytest.approx(eval_phi(w, z) + eval_psi(w, z), abs=1e-12)


def test_kernel_matches_scalar_evaluators_moebius_domain():
    dom = DomainSpec.moebius(1.5, 0.2, 0.1, 1.3)
    z0 = complex(dom.forward(0.0))
    w = WeightPair.standard([MarkedPoint(z0)], u_coeffs=(0.1, 0.2))
    k = WeightKernel(dom, w)
    rng = np.random.default_rng(19)
    for _ in range(20):
        zeta = rng.uniform(-0.6, 0.6) + 1j * rng.uniform(-0.6, 0.6)
        if abs(zeta) < 0.05:
            continue
        z = complex(dom.forward(zeta))
        assert float(k.psi(zeta)) == pytest.approx(eval_psi(w, z, dom), abs=1e-12)
        assert float(k.phi_plus_psi(zeta)) == pytest.approx(
            eval_phi(w, z, dom) + eval_psi(w, z, dom), abs=1e-12
        )


def test_kernel_weight_value():
    w = two_point_pair()
    k = WeightKernel(UNIT_DISC, w)
    flat = GainFunction.constant(1.0)
    assert float(k.weight(flat, 0.9)) == pytest.approx(2.0, abs=1e-12)
    grow = GainFunction.exponential(0.5)
    psi = eval_psi(w, 0.9)
    assert float(k.weight(grow, 0.9)) == pytest.approx(
        2.0 * math.exp(-0.5 * psi), rel=1e-12
    )


def test_kernel_singular_centers():
    w = two_point_pair()
    k = WeightKernel(UNIT_DISC, w)
    centers = {z: (p, m, nu) for z, p, m, nu in k.singular_centers()}
    assert centers[0.0 + 0.0j] == (2.0, 2, 1)
    assert centers[0.5 + 0.0j] == (1.0, 1, 0)


def test_kernel_singular_centers_zero_jet():
    marked = (MarkedPoint(0.0, jet_order=1, jet_coeff=0.0),)
    w = WeightPair.standard(marked)
    k = WeightKernel(UNIT_DISC, w)
    (zeta, p, m, nu), = k.singular_centers()
    assert nu == 2  # zero target coefficient forces one extra order
