import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loccgrav.coherent import CoherentParams, coherent_hamiltonian, probe_initial_state
from loccgrav.errors import InvalidTransformationError, PreconditionError
from loccgrav.kraus import (
    HADAMARD_MIX, KrausSet, apply_channel, channel_distance, compose, default_sample_states,
    directional_generator, fit_exponent, kraus_from_generator, locc_loop_operators, locc_product_form_kraus,
    mix_kraus, operator_schmidt_rank, product_form_pair, separability_defect,
)
from loccgrav.lindblad import LindbladGenerator, LoccParams, build_locc_generator, rk4_step
from loccgrav.operators import DensityState, OperatorMatrix, fock_state, negativity, random_unitary, trace_distance

EQUAL = LoccParams.equal_rates()
DIM = 6
DTS = [1e-3, 1e-4, 1e-5, 1e-6]


def identity_set(dims, dt=1e-3):
    return KrausSet((OperatorMatrix(np.eye(int(np.prod(dims))), dims),), dt)


def vac_plus(dim=DIM):
    return DensityState(probe_initial_state(fock_state(dim, 0)), (dim, 2))


def test_zero_generator_gives_identity():
    gen = LindbladGenerator(OperatorMatrix(np.zeros((4, 4)), (2, 2)))
    ks = kraus_from_generator(gen, 0.01)
    assert len(ks) == 1
    np.testing.assert_array_equal(ks.operators[0].data, np.eye(4))


def test_completeness_scales_as_dt_squared():
    gen = build_locc_generator(EQUAL, DIM)
    defects = [kraus_from_generator(gen, dt).completeness_defect() for dt in DTS]
    assert abs(fit_exponent(DTS, defects) - 2.0) < 0.25


def test_mixing():
    ks = kraus_from_generator(build_locc_generator(EQUAL, DIM), 1e-3)
    same = mix_kraus(ks, np.eye(len(ks)))
    assert all(np.array_equal(a.data, b.data) for a, b in zip(ks.operators, same.operators))
    with pytest.raises(InvalidTransformationError):
        mix_kraus(ks, 2 * np.eye(len(ks)))
    with pytest.raises(InvalidTransformationError):
        mix_kraus(ks, np.eye(2))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_mixing_leaves_channel_invariant(seed):
    rng = np.random.default_rng(seed)
    ks = kraus_from_generator(build_locc_generator(EQUAL, 4), 1e-3)
    mixed = mix_kraus(ks, random_unitary(len(ks), rng))
    assert channel_distance(ks, mixed, default_sample_states((4, 2), 10, seed % 1000)) < 1e-12


def test_sqrt_dt_terms_survive_mixing():
    (ma, fb), _ = locc_loop_operators(EQUAL, DIM)
    for dt in (1e-4, 1e-6):
        mixed = mix_kraus(kraus_from_generator(directional_generator(ma, fb, 0), dt), HADAMARD_MIX)
        for op in mixed.operators:
            # both mixed operators carry L_0/sqrt2 = 1/sqrt2 + O(dt); the remainder is the sqrt(dt) term
            rest = np.linalg.norm(op.data - np.eye(op.shape[0]) / np.sqrt(2), 2)
            assert 0.1 * np.sqrt(dt) < rest < 10 * np.sqrt(dt)


def test_product_pair_trivial_and_validation():
    z2, z3 = OperatorMatrix(np.zeros((3, 3)), (3,)), OperatorMatrix(np.zeros((2, 2)), (2,))
    pair = product_form_pair(z2, z3, 0.01)
    for op in pair.operators:
        np.testing.assert_allclose(op.data, np.eye(6) / np.sqrt(2))
    rho = vac_plus(3)
    np.testing.assert_allclose(apply_channel(pair, rho).data, rho.data, atol=1e-15)
    with pytest.raises(PreconditionError):
        product_form_pair(OperatorMatrix(np.array([[0, 1], [0, 0]]), (2,)), z3, 0.01)


def test_product_pair_matches_mixed_loop():
    (ma, fb), _ = locc_loop_operators(EQUAL, DIM)
    dists = []
    for dt in DTS:
        mixed = mix_kraus(kraus_from_generator(directional_generator(ma, fb, 0), dt), HADAMARD_MIX)
        pair = product_form_pair(ma, fb, dt, 0)
        op_err = max(np.linalg.norm(a.data - b.data, 2) for a, b in zip(mixed.operators, pair.operators))
        dists.append(op_err)
    assert fit_exponent(DTS, dists) > 1.5 - 0.25


def test_compose_identity_and_completeness():
    ks = locc_product_form_kraus(EQUAL, DIM, 1e-3)
    assert len(ks) == 4
    same = compose(identity_set((DIM, 2)), ks)
    assert all(np.allclose(a.data, b.data) for a, b in zip(ks.operators, same.operators))
    defects = [locc_product_form_kraus(EQUAL, DIM, dt).completeness_defect() for dt in DTS]
    assert fit_exponent(DTS, defects) > 1.75


def test_identity_channel():
    rho = vac_plus()
    np.testing.assert_allclose(apply_channel(identity_set((DIM, 2)), rho).data, rho.data)


def test_generator_kraus_vs_rk4_step():
    gen = build_locc_generator(EQUAL, DIM)
    states = default_sample_states((DIM, 2), 6)
    errs = []
    for dt in (1e-2, 1e-3):
        ks = kraus_from_generator(gen, dt)
        errs.append(max(trace_distance(apply_channel(ks, s), rk4_step(gen, s.data, dt)) for s in states))
    assert abs(np.log10(errs[0] / errs[1]) - 2.0) < 0.25


def test_product_form_vs_generator_scaling():
    gen = build_locc_generator(EQUAL, DIM, include_free=False)
    samples = default_sample_states((DIM, 2), 20)
    d = [channel_distance(locc_product_form_kraus(EQUAL, DIM, dt), kraus_from_generator(gen, dt), samples)
         for dt in DTS]
    assert fit_exponent(DTS, d) >= 1.25


def test_separability_defects():
    (ma, fb), (mb, fa) = locc_loop_operators(EQUAL, DIM)
    assert separability_defect(product_form_pair(ma, fb, 1e-3, 0)) == 0
    assert separability_defect(product_form_pair(mb, fa, 1e-3, 1)) == 0
    assert separability_defect(locc_product_form_kraus(EQUAL, DIM, 1e-3)) == 0
    assert separability_defect(kraus_from_generator(build_locc_generator(EQUAL, DIM), 1e-3)) > 0
    assert operator_schmidt_rank(OperatorMatrix(np.zeros((4, 4)), (2, 2))) == 0


def test_product_form_channel_keeps_states_separable():
    ks = locc_product_form_kraus(EQUAL, DIM, 0.01)
    rho = vac_plus()
    for _ in range(400):
        rho = apply_channel(ks, rho)
        assert negativity(rho).negativity < 1e-7


def test_coherent_hamiltonian_kraus_entangles():
    dim, dt = 12, 2 * np.pi / 1000
    cp = CoherentParams(1.0, 0.05)
    ks = kraus_from_generator(LindbladGenerator(coherent_hamiltonian(cp, dim)), dt)
    rho = vac_plus(dim)
    for _ in range(500):
        rho = apply_channel(ks, rho)
    assert negativity(rho).negativity > 1e-3


def test_json_round_trip():
    ks = locc_product_form_kraus(EQUAL, 3, 1e-3)
    back = KrausSet.from_json(ks.to_json())
    assert back.dt == ks.dt and back.order_label == ks.order_label and back.dims == ks.dims
    assert all(np.array_equal(a.data, b.data) for a, b in zip(ks.operators, back.operators))


def test_empty_set_rejected():
    with pytest.raises(PreconditionError):
        KrausSet((), 0.1)
