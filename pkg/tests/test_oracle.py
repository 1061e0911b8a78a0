import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from symindex.iteration import (
    NormalFormDecomposition,
    PathIndexData,
    index_iterate,
    nullity_iterate,
)
from symindex.normal_forms import nontrivial_n2_block, realize, trivial_n2_block
from symindex.oracle import (
    OracleError,
    cz_index,
    diamond_paths,
    estimate_splitting,
    extend_with_xi,
    iterate_path,
    path_from_logm,
    path_from_matrix_function,
    path_from_quadratic_hamiltonian,
    path_from_samples,
    xi_matrix,
)
from symindex.scalars import Scalar

from conftest import n1_minus_path, rot_data, rotation_path, shear_path

HALF = Scalar.rational(1, 2)


# ----- constructors ----------------------------------------------------------

def test_quadratic_path_zero_generator():
    p = path_from_quadratic_hamiltonian(np.zeros((2, 2)), 1.0)
    assert np.allclose(p.mats, np.eye(2))


def test_quadratic_path_rotation():
    p = path_from_quadratic_hamiltonian(np.eye(2), 2.0, steps=256)
    for t in (0.3, 1.2, 2.0):
        M = p.evaluate(t)
        want = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
        assert np.allclose(M, want, atol=1e-12)


def test_quadratic_path_block_decoupling():
    B = np.diag([0.7, 1.3, 0.7, 1.3])
    p = path_from_quadratic_hamiltonian(B, 1.0, steps=128)
    p1 = path_from_quadratic_hamiltonian(0.7 * np.eye(2), 1.0, steps=128)
    p2 = path_from_quadratic_hamiltonian(1.3 * np.eye(2), 1.0, steps=128)
    pd = diamond_paths(p1, p2, steps=128)
    assert np.allclose(p.mats, pd.mats, atol=1e-12)


def test_quadratic_path_requires_symmetric():
    with pytest.raises(OracleError):
        path_from_quadratic_hamiltonian(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_path_samples_must_start_at_identity():
    ts = [0.0, 0.5, 1.0]
    mats = [np.diag([2.0, 0.5])] * 3
    with pytest.raises(OracleError, match="identity"):
        path_from_samples(ts, mats, n=1, tau=1.0)


def test_step_bound_enforced():
    p = path_from_quadratic_hamiltonian(4.0 * np.eye(2), 6.0, steps=16, check=False)
    with pytest.raises(OracleError, match="step-size"):
        p.validate()


# ----- extension -------------------------------------------------------------

def test_extend_constant_path():
    p = path_from_quadratic_hamiltonian(np.zeros((2, 2)), 1.0, steps=64)
    ext = extend_with_xi(p)
    assert np.allclose(ext.mats[0], np.diag([2.0, 0.5]))
    assert np.allclose(ext.mats[ext.junction_index], np.eye(2))
    assert np.allclose(ext.mats[-1], p.endpoint())


def test_extension_start_off_the_variety():
    # D_1(xi_n(0)) != 0: eigenvalues 2 and 1/2
    from symindex.oracle import _d_single

    for n in (1, 2, 3):
        assert abs(_d_single(xi_matrix(n, 0.0, 1.0), 1.0, n)) > 1e-6


def test_extension_preserves_endpoint():
    p = rotation_path(0.5, steps=128)
    ext = extend_with_xi(p)
    assert np.allclose(ext.mats[-1], p.endpoint())


# ----- iteration -------------------------------------------------------------

def test_iterate_path_m1_identity():
    p = rotation_path(0.5, steps=128)
    assert iterate_path(p, 1) is p


def test_iterate_path_endpoint_square():
    p = shear_path(1, steps=128)
    p2 = iterate_path(p, 2)
    assert np.allclose(p2.endpoint(), p.endpoint() @ p.endpoint(), atol=1e-12)


def test_iterate_rotation_is_resampled_group():
    p = rotation_path(0.5, steps=128)
    p3 = iterate_path(p, 3)
    for t in (0.4, 1.7, 2.9):
        s = t * 0.5 * math.pi
        want = np.array([[math.cos(s), -math.sin(s)], [math.sin(s), math.cos(s)]])
        assert np.allclose(p3.evaluate(t), want, atol=1e-10)


# ----- index computation -----------------------------------------------------

def test_rotation_base_index_is_odd():
    i1, nu1 = cz_index(rotation_path(0.5), 1)
    assert i1 % 2 == 1
    assert (i1, nu1) == (1, 0)


def test_rotation_iterates_match_formula():
    p = rotation_path(0.5)
    data = rot_data(HALF, i1=cz_index(p, 1)[0])
    for m in range(1, 21):
        got = cz_index(iterate_path(p, m), 1)
        assert got == (index_iterate(data, m), nullity_iterate(data, m))


def test_full_period_nullity():
    p = rotation_path(0.5)
    _i, nu = cz_index(iterate_path(p, 4), 1)
    assert nu == 2


FAMILIES = [
    ("rot_half", lambda: rotation_path(0.5),
     NormalFormDecomposition(n=1, thetas=(HALF,)), 1),
    ("rot_irrational", lambda: rotation_path(float(Scalar.sqrt(2)) / 2),
     NormalFormDecomposition(n=1, thetas=(Scalar.sqrt(2) * Fraction(1, 2),)), 1),
    ("shear_plus", lambda: shear_path(1),
     NormalFormDecomposition(n=1, p_minus=1), -1),
    ("shear_minus", lambda: shear_path(-1),
     NormalFormDecomposition(n=1, p_plus=1), 0),
    ("minus_identity", lambda: rotation_path(1.0),
     NormalFormDecomposition(n=1, q_zero=1), 1),
    ("constant", lambda: path_from_quadratic_hamiltonian(np.zeros((2, 2)), 1.0),
     NormalFormDecomposition(n=1, p_zero=1), -1),
    ("hyperbolic", lambda: path_from_quadratic_hamiltonian(
        np.array([[0.0, -math.log(2)], [-math.log(2), 0.0]]), 1.0),
     NormalFormDecomposition(n=1, k=1), 0),
    ("clockwise", lambda: rotation_path(-0.5),
     NormalFormDecomposition(n=1, thetas=(Scalar.rational(3, 2),)), -1),
    ("q_minus", lambda: n1_minus_path(1),
     NormalFormDecomposition(n=1, q_minus=1), 1),
    ("q_plus", lambda: n1_minus_path(-1),
     NormalFormDecomposition(n=1, q_plus=1), 1),
]


@pytest.mark.parametrize("name,maker,decomp,i1", FAMILIES, ids=[f[0] for f in FAMILIES])
def test_single_block_families_match_formula(name, maker, decomp, i1):
    path = maker()
    data = PathIndexData(decomp, i1=i1)
    assert cz_index(path, 1)[0] == i1
    for m in (1, 2, 3, 4, 5, 8, 11):
        got = cz_index(iterate_path(path, m), 1)
        want = (index_iterate(data, m), nullity_iterate(data, m))
        assert got == want, f"{name} m={m}: {got} != {want}"


def test_well_definedness_under_reparametrization():
    p = rotation_path(0.5)

    def repar(t):
        s = t * t * 0.5 * math.pi
        return np.array([[math.cos(s), -math.sin(s)], [math.sin(s), math.cos(s)]])

    q = path_from_matrix_function(repar, 1.0, 1)
    assert cz_index(p, 1) == cz_index(q, 1)
    assert cz_index(p, -1) == cz_index(q, -1)


def test_omega_must_be_unimodular():
    with pytest.raises(OracleError):
        cz_index(rotation_path(0.5), 2.0)


# ----- splitting recovery ----------------------------------------------------

SPLIT_ROWS = [
    ("N1(1,1)@1", lambda: shear_path(1), 1, (1, 1)),
    ("I2@1", lambda: path_from_quadratic_hamiltonian(np.zeros((2, 2)), 1.0), 1, (1, 1)),
    ("N1(1,-1)@1", lambda: shear_path(-1), 1, (0, 0)),
    ("N1(-1,1)@-1", lambda: n1_minus_path(1), -1, (0, 0)),
    ("-I2@-1", lambda: rotation_path(1.0), -1, (1, 1)),
    ("N1(-1,-1)@-1", lambda: n1_minus_path(-1), -1, (1, 1)),
    ("R(0.4pi)", lambda: rotation_path(0.4), cmath.exp(0.4j * math.pi), (0, 1)),
    ("R(1.6pi)", lambda: rotation_path(1.6), cmath.exp(1.6j * math.pi), (0, 1)),
    ("N2nontriv", lambda: path_from_logm(
        realize(nontrivial_n2_block(Scalar.rational(2, 5))).as_float()),
     cmath.exp(0.4j * math.pi), (1, 1)),
    ("N2triv", lambda: path_from_logm(
        realize(trivial_n2_block(Scalar.rational(2, 5))).as_float()),
     cmath.exp(0.4j * math.pi), (0, 0)),
    ("off-spectrum", lambda: rotation_path(0.4), -1, (0, 0)),
]


@pytest.mark.parametrize("name,maker,omega,want", SPLIT_ROWS, ids=[r[0] for r in SPLIT_ROWS])
def test_splitting_recovery(name, maker, omega, want):
    assert estimate_splitting(maker(), omega) == want
