import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from disent.channels import (
    ChannelKind, ChannelSpec, DecaySchedule, apply_joint, depol_coeffs, evolve_o, evolve_x,
    kraus_ops, kraus_sum, p_of_t,
)
from disent.density import (
    OState, bell_phi, decompose, embed, random_density, random_x_state,
)

kinds = st.sampled_from(list(ChannelKind))
probs = st.floats(0.0, 1.0)
seeds = st.integers(0, 2**32 - 1)


@given(kinds, probs)
def test_kraus_completeness(kind, p):
    total = sum(k.conj().T @ k for k in kraus_ops(kind, p))
    np.testing.assert_allclose(total, np.eye(2), atol=1e-14)


def test_amplitude_identity_at_zero():
    k0, k1 = kraus_ops("amplitude", 0.0)
    np.testing.assert_array_equal(k0, np.eye(2))
    assert not k1.any()


def test_phase_damping_full_strength():
    k0, k1 = kraus_ops("phase", 1.0)
    np.testing.assert_array_equal(k0, np.diag([1, 0]))
    np.testing.assert_array_equal(k1, np.diag([0, 1]))


def test_kind_aliases():
    assert ChannelKind.parse("AD") is ChannelKind.AMPLITUDE
    assert ChannelKind.parse("depol") is ChannelKind.DEPOLARIZING
    with pytest.raises(ValueError):
        ChannelKind.parse("bitflip")


def test_spec_validation():
    with pytest.raises(ValueError):
        ChannelSpec("phase", 1.2, 0.0)


@given(seeds, kinds)
def test_identity_channel(seed, kind):
    rho = random_density(seed)
    np.testing.assert_allclose(apply_joint(rho, ChannelSpec(kind, 0, 0)).elems, rho.elems, atol=1e-15)


def test_full_amplitude_damping_empties_to_ground():
    out = apply_joint(embed(bell_phi()), ChannelSpec("amplitude", 1, 1))
    assert out.elems[3, 3] == pytest.approx(1.0)


def test_depolarizing_fixed_point():
    out = apply_joint(embed(bell_phi()), ChannelSpec("depolarizing", 0.75, 0.75))
    np.testing.assert_allclose(out.elems, np.eye(4) / 4, atol=1e-15)


@given(seeds, kinds, probs, probs)
def test_trace_and_positivity_preserved(seed, kind, pa, pb):
    out = apply_joint(random_density(seed), ChannelSpec(kind, pa, pb))
    assert abs(out.trace - 1) <= 1e-12
    assert out.min_eigenvalue() >= -1e-9


@given(seeds, kinds, probs, probs)
def test_closed_forms_match_kraus(seed, kind, pa, pb):
    rho = random_density(seed)
    spec = ChannelSpec(kind, pa, pb)
    x, o = decompose(rho)
    want = apply_joint(rho, spec).elems
    got = evolve_x(x, spec).matrix() + evolve_o(o, spec).matrix()
    np.testing.assert_allclose(got, want, atol=1e-12, rtol=0)


@given(seeds, kinds, probs, probs)
def test_x_and_o_evolve_independently(seed, kind, pa, pb):
    rho = random_density(seed)
    spec = ChannelSpec(kind, pa, pb)
    x, o = decompose(rho)
    xt, ot = decompose(apply_joint(rho, spec))
    xt_alone = kraus_sum(x.matrix(), spec)
    ot_alone = kraus_sum(o.matrix(), spec)
    np.testing.assert_allclose(xt.matrix(), xt_alone, atol=1e-12)
    np.testing.assert_allclose(ot.matrix(), ot_alone, atol=1e-12)


def test_phase_damped_bell_coherence():
    p = 1 - math.exp(-2)
    xt = evolve_x(bell_phi(), ChannelSpec("phase", p, p))
    # sqrt(q_a q_b) = e^-2 when each qubit keeps q = e^-2
    assert xt.c14 == pytest.approx(math.exp(-2) / 2, abs=1e-15)
    assert xt.diag == bell_phi().diag


def test_o_transfer_under_amplitude_damping():
    ot = evolve_o(OState(c13=0.1), ChannelSpec("amplitude", 0.0, 1.0))
    assert ot.c13 == 0 and ot.c24 == pytest.approx(0.1)


@given(probs, probs)
def test_depol_rows_sum_to_one(pa, pb):
    f = depol_coeffs(pa, pb)
    assert f.f1 + f.f2 + f.f3 + f.f4 == pytest.approx(1.0, abs=1e-15)


def test_depol_coefficient_limits():
    f = depol_coeffs(0, 0)
    assert (f.f0, f.f1, f.f5, f.f7) == (1, 1, 1, 1)
    assert f.f2 == f.f3 == f.f4 == f.f6 == f.f8 == 0
    f = depol_coeffs(0.75, 0.75)
    assert f.f0 == pytest.approx(0, abs=1e-16)
    for v in (f.f1, f.f2, f.f3, f.f4):
        assert v == pytest.approx(0.25)


def test_p_of_t():
    sched = DecaySchedule(1.0, 2.0)
    assert p_of_t(sched, 0) == (0.0, 0.0)
    assert p_of_t(sched, math.log(2))[0] == pytest.approx(0.5)
    assert p_of_t(sched, 1e3) == (1.0, 1.0)
    with pytest.raises(ValueError):
        DecaySchedule(0.0, 1.0)


def test_depolarizing_schedule_limit():
    spec = DecaySchedule(1, 1).spec_at("depolarizing", 1e3)
    assert spec.p_a == pytest.approx(0.75)


def test_survival_keeps_precision():
    spec = DecaySchedule(1, 1).spec_at("amplitude", 60.0)
    assert spec.q_a == math.exp(-60.0)


@given(seeds, st.sampled_from(["amplitude", "phase"]), st.floats(0, 3), st.floats(0, 3))
def test_semigroup(seed, kind, t1, t2):
    sched = DecaySchedule(1.3, 0.7)
    m = random_density(seed).elems
    two_step = kraus_sum(kraus_sum(m, sched.spec_at(kind, t1)), sched.spec_at(kind, t2))
    one_step = kraus_sum(m, sched.spec_at(kind, t1 + t2))
    np.testing.assert_allclose(two_step, one_step, atol=1e-12)


@given(seeds, kinds, probs, probs)
def test_x_states_stay_x(seed, kind, pa, pb):
    x = random_x_state(seed)
    xt, ot = decompose(apply_joint(embed(x), ChannelSpec(kind, pa, pb)))
    assert ot.max_abs() <= 1e-15
    np.testing.assert_allclose(xt.matrix(), evolve_x(x, ChannelSpec(kind, pa, pb)).matrix(), atol=1e-12)
