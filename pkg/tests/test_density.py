import numpy as np
import pytest
from hypothesis import given, strategies as st

from disent.density import (
    NotHermitian, NotPositive, OState, TraceNotOne, Tolerances, XState,
    bell_phi, decompose, density_from_json, embed, make_density, maximally_mixed,
    random_density, random_x_state, recompose, state_from_json, werner_state,
)
from disent.concurrence import q_phi, q_psi

seeds = st.integers(0, 2**32 - 1)


def test_maximally_mixed_is_valid():
    rho = make_density(np.eye(4) / 4)
    assert rho.trace == pytest.approx(1.0)


def test_bell_matrix_is_valid():
    rho = embed(bell_phi())
    assert rho.purity() == pytest.approx(1.0)
    assert rho.elems[0, 3] == 0.5


def test_trace_violation():
    with pytest.raises(TraceNotOne):
        make_density(np.eye(4) * 1.5 / 4)


def test_hermiticity_violation():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 0.1
    with pytest.raises(NotHermitian):
        make_density(m)


def test_positivity_violation():
    m = np.diag([0.5, 0.5, 0.0, 0.0]).astype(complex)
    m[0, 3] = m[3, 0] = 0.3
    with pytest.raises(NotPositive):
        make_density(m)


def test_tolerances_are_overridable():
    m = np.eye(4) / 4
    m[0, 0] += 1e-8
    with pytest.raises(TraceNotOne):
        make_density(m)
    make_density(m, Tolerances(trace=1e-6))


def test_decompose_bell():
    x, o = decompose(embed(bell_phi()))
    assert x.c14 == 0.5 and o.is_zero()


def test_decompose_single_o_entry():
    m = np.eye(4, dtype=complex) / 4
    m[0, 1], m[1, 0] = 0.1j, -0.1j
    x, o = decompose(make_density(m))
    assert x.c14 == 0 and x.c23 == 0
    assert o.c12 == 0.1j and o.c13 == o.c24 == o.c34 == 0


def test_recompose_rejects_oversized_o():
    x = maximally_mixed()
    with pytest.raises(NotPositive):
        recompose(x, OState(c12=0.4))


@given(seeds, st.integers(1, 4))
def test_round_trip_is_bit_exact(seed, rank):
    rho = random_density(seed, rank)
    x, o = decompose(rho)
    assert np.array_equal(recompose(x, o).elems, rho.elems)


@given(seeds, st.integers(1, 4))
def test_random_density_invariants(seed, rank):
    rho = random_density(seed, rank)
    m = rho.elems
    assert np.max(np.abs(m - m.conj().T)) <= 1e-12
    assert abs(np.trace(m).real - 1) <= 1e-12
    assert rho.min_eigenvalue() >= -1e-12


def test_random_density_deterministic():
    assert random_density(7) == random_density(7)
    assert random_density(7) != random_density(8)


def test_rank_one_is_pure():
    assert random_density(3, rank=1).purity() == pytest.approx(1.0, abs=1e-12)


@given(seeds, st.sampled_from(["Phi", "Psi"]))
def test_random_x_state_type(seed, kind):
    x = random_x_state(seed, kind)
    if kind == "Phi":
        assert q_phi(x) >= q_psi(x)
    else:
        assert q_psi(x) > q_phi(x)
    embed(x)  # X positivity is exactly the two block conditions


def test_werner_endpoints():
    assert werner_state(1.0) == bell_phi()
    assert werner_state(0.0) == maximally_mixed()
    with pytest.raises(ValueError):
        werner_state(1.2)


def test_x_state_rejects_block_violation():
    with pytest.raises(NotPositive):
        XState(0.25, 0.25, 0.25, 0.25, c14=0.3)


@given(seeds)
def test_json_round_trips(seed):
    rho = random_density(seed)
    assert density_from_json(rho.to_json()) == rho
    x = random_x_state(seed)
    back, _ = decompose(state_from_json(x.to_json()))
    assert back == x


def test_state_json_needs_known_fields():
    with pytest.raises(ValueError):
        state_from_json({"foo": 1})
