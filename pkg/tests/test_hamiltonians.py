import numpy as np
import pytest

from symqa.errors import ArgumentError, ContractError
from symqa.hamiltonians import (AnnealSchedule, deformed_spin_star, random_xxz_chain,
                                schedule_at, table1_couplings, transverse_field, xy_ring,
                                xy_ground_energy_analytic)
from symqa.spin_ops import ManyBodyOperator, total_sz, zero
from symqa.symmetry import decompose, restrict

TABLE1 = [0.8441683664299817, 0.47574391516586223, 0.06980280523824778, 0.6197240483819366]


def comm(H):
    Q = total_sz(H.sites).matrix
    return np.max(np.abs(H.matrix @ Q - Q @ H.matrix))


def test_transverse_single_site():
    np.testing.assert_array_equal(transverse_field(1, 1.0).matrix, [[0, -1], [-1, 0]])


@pytest.mark.parametrize("L", [1, 3, 4])
def test_transverse_ground(L):
    H = transverse_field(L, 1.0)
    assert H.eigvalsh()[0] == pytest.approx(-L)
    plus = np.full(2**L, 2 ** (-L / 2))
    np.testing.assert_allclose(H.matrix @ plus, -L * plus, atol=1e-12)


def test_xy_two_sites_doubles_bond():
    np.testing.assert_allclose(np.sort(xy_ring(2, 1.0).eigvalsh()), [-8, 0, 0, 8], atol=1e-12)


def test_xy_zero_and_small():
    np.testing.assert_array_equal(xy_ring(3, 0.0).matrix, 0)
    with pytest.raises(ArgumentError):
        xy_ring(1, 1.0)


@pytest.mark.parametrize("H", [xy_ring(4, 1.0), random_xxz_chain(TABLE1[:3], 0.7),
                               deformed_spin_star(3, 0.5, 0.5, 5.0),
                               deformed_spin_star(3, 0.5, 0.5, 5.0, phase="real")])
def test_conserving_hamiltonians(H):
    assert H.hermitian
    assert comm(H) <= 1e-12


def test_transverse_breaks_conservation():
    assert comm(transverse_field(4, 1.0)) > 0.5


def test_spin_star_site_count_and_phase():
    assert deformed_spin_star(3, 0.5, 0.5, 5.0).sites == 4
    with pytest.raises(ArgumentError):
        deformed_spin_star(3, 0.5, 0.5, 5.0, phase="imaginary")


def test_spin_star_decoupled_limit():
    # J = 0 leaves a diagonal field with energies from omega, omega1
    H = deformed_spin_star(2, 0.5, 0.25, 0.0)
    assert H.eigvalsh()[0] == pytest.approx(-0.5 - 2 * 0.25)


def test_xxz_two_site_spectrum():
    # singlet -2 - delta, triplet m=0 2 - delta, triplet m=+-1 delta
    H = random_xxz_chain([1.0], 0.5)
    np.testing.assert_allclose(np.sort(H.eigvalsh()), [-2.5, 0.5, 0.5, 1.5], atol=1e-12)


def test_xxz_needs_couplings():
    with pytest.raises(ArgumentError):
        random_xxz_chain([], 0.7)


def test_table1_fixture():
    assert table1_couplings() == TABLE1


@pytest.mark.parametrize("L", range(2, 9))
def test_jordan_wigner_all_fillings(L):
    H = xy_ring(L, 1.0)
    for sector in decompose(L):
        dense = np.linalg.eigvalsh(restrict(H, sector).matrix)[0]
        assert xy_ground_energy_analytic(L, 1.0, sector.down) == pytest.approx(dense, abs=1e-9)


def test_jordan_wigner_scales_with_g():
    assert xy_ground_energy_analytic(6, 2.5, 3) == pytest.approx(
        2.5 * xy_ground_energy_analytic(6, 1.0, 3))


def test_jordan_wigner_bad_filling():
    with pytest.raises(ArgumentError):
        xy_ground_energy_analytic(4, 1.0, 5)


def test_xy_gap_shrinks_with_length():
    gaps = []
    for L in (4, 6, 8):
        w = xy_ring(L, 1.0).eigvalsh()
        gaps.append(w[w > w[0] + 1e-9][0] - w[0])
    np.testing.assert_allclose(gaps, [3.3137, 2.1436, 1.5913], atol=1e-3)
    assert gaps[0] > gaps[1] > gaps[2]


def test_schedule_endpoints_and_midpoint():
    hp, hd = random_xxz_chain([1.0], 0.7), transverse_field(2, 1.0)
    sched = AnnealSchedule(hp, hd, 10.0)
    assert schedule_at(sched, 0.0) is hd
    assert sched.at(10.0) is hp
    np.testing.assert_allclose(sched.at(5.0).matrix, 0.5 * (hp.matrix + hd.matrix))
    with pytest.raises(ArgumentError):
        sched.at(11.0)


def test_schedule_validation():
    with pytest.raises(ArgumentError):
        AnnealSchedule(zero(2), zero(3), 1.0)
    with pytest.raises(ArgumentError):
        AnnealSchedule(zero(2), zero(2), 0.0)
    with pytest.raises(ContractError):
        AnnealSchedule(ManyBodyOperator(1, [[0, 1], [0, 0]]), zero(1), 1.0)
