import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dephased_battery.dicke import DickeSpace, collective_ops, level_multiplicities, make_space

from conftest import SIGMA_UP, dicke_vectors, site_operator


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_ladder_matches_product_space_projection(n):
    # J+ = sum_k sigma_k^+ restricted to the symmetric subspace
    full = sum(site_operator(SIGMA_UP, k, n) for k in range(n))
    basis = dicke_vectors(n)
    projected = basis.conj().T @ full @ basis
    ops = collective_ops(make_space(n))
    np.testing.assert_allclose(ops.j_plus, projected, atol=1e-12)


@given(st.integers(1, 30))
def test_algebra(n):
    ops = collective_ops(make_space(n))
    j = n / 2
    comm = ops.j_plus @ ops.j_minus - ops.j_minus @ ops.j_plus
    np.testing.assert_allclose(comm, 2 * ops.j_z, atol=1e-9)
    casimir = ops.j_z @ ops.j_z + 0.5 * (ops.j_plus @ ops.j_minus + ops.j_minus @ ops.j_plus)
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(n + 1), atol=1e-9)
    np.testing.assert_allclose(ops.number_op, ops.j_z + j * np.eye(n + 1), atol=1e-12)


@given(st.integers(1, 40))
def test_space_shape(n):
    space = DickeSpace(n)
    assert space.dim == n + 1
    assert space.m_values[0] == -n / 2 and space.m_values[-1] == n / 2
    assert level_multiplicities(n).sum() == 2**n


def test_ladder_raises_one_level():
    space = make_space(3)
    ops = collective_ops(space)
    out = ops.j_plus @ space.basis_state(0)
    assert np.argmax(np.abs(out)) == 1
    assert abs(out[1]) == pytest.approx(np.sqrt(3))


def test_operators_are_read_only():
    ops = collective_ops(make_space(2))
    with pytest.raises(ValueError):
        ops.j_plus[0, 0] = 1.0


@pytest.mark.parametrize("bad", [0, -3])
def test_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        DickeSpace(bad)


@pytest.mark.parametrize("bad", [1.5, True, "4"])
def test_rejects_non_integer(bad):
    with pytest.raises(TypeError):
        DickeSpace(bad)


def test_basis_state_bounds():
    with pytest.raises(IndexError):
        make_space(2).basis_state(3)
