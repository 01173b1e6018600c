import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aqec.codes import AqecCode, binomial_code, ladder_code, thirteen_code, trivial_code
from aqec.lindblad import (apply, build_lindbladian, dissipator, hamiltonian_part, propagate,
                           unvec, vec)
from aqec.models import photon_loss, power_law, uniform_decay
from aqec.optimizer import OptimizerConfig, init_random
from conftest import random_density, random_hermitian, random_matrix

seeds = st.integers(0, 2**32 - 1)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


def direct_dissipator(a, rho):
    ad = a.conj().T
    return a @ rho @ ad - 0.5 * (ad @ a @ rho + rho @ ad @ a)


def random_instance(seed):
    """A model/code pair drawn from the in-scope models with random code parts."""
    rng = np.random.default_rng(seed)
    n = int(rng.choice([2, 3, 4, 5]))
    model = [uniform_decay, photon_loss, lambda k: power_law(k, float(rng.uniform(0, 1)))][
        int(rng.integers(3))](n)
    code = init_random(model, OptimizerConfig(seed=int(rng.integers(2**31)),
                                              num_induced_jumps=int(rng.integers(0, 3))))
    return model, code, rng


def test_vec_conventions():
    np.testing.assert_array_equal(vec(np.eye(2) / 2), [0.5, 0, 0, 0.5])
    np.testing.assert_array_equal(vec(np.array([[0, 1], [0, 0]])), [0, 0, 1, 0])


def test_vec_index_formula(rng):
    rho = random_matrix(rng, 5)
    v = vec(rho)
    for i in range(5):
        for j in range(5):
            assert v[j * 5 + i] == rho[i, j]


@given(seeds)
def test_vec_roundtrip(seed):
    rho = random_hermitian(np.random.default_rng(seed), 5)
    assert np.array_equal(unvec(vec(rho)), rho)


def test_unvec_rejects_bad_length():
    with pytest.raises(ValueError):
        unvec(np.zeros(5))


def test_column_stacking_identity(rng):
    a, x, b = (random_matrix(rng, 3) for _ in range(3))
    np.testing.assert_allclose(np.kron(b.T, a) @ vec(x), vec(a @ x @ b), atol=1e-13)


def test_zero_dissipator():
    assert not np.any(dissipator(np.zeros((3, 3))))


def test_qubit_relaxation_rates():
    g = 0.7
    a = math.sqrt(g) * np.array([[0, 1], [0, 0]], dtype=complex)
    drho = apply(dissipator(a), np.diag([0.0, 1.0]))
    np.testing.assert_allclose(drho, np.diag([g, -g]), atol=1e-15)


@given(seeds)
def test_dissipator_matches_direct_products(seed):
    rng = np.random.default_rng(seed)
    a, rho = random_matrix(rng, 3), random_density(rng, 3)
    np.testing.assert_allclose(apply(dissipator(a), rho), direct_dissipator(a, rho), atol=1e-13)


def test_dissipator_rejects_non_square():
    with pytest.raises(ValueError):
        dissipator(np.zeros((2, 3)))


def test_hamiltonian_part_identity_commutes(rng):
    rho = random_density(rng, 4)
    assert np.max(np.abs(apply(hamiltonian_part(np.eye(4)), rho))) == 0


def test_hamiltonian_part_pauli_commutator():
    np.testing.assert_allclose(apply(hamiltonian_part(SIGMA_Z), SIGMA_X), 2 * SIGMA_Y, atol=1e-15)


@given(seeds)
def test_hamiltonian_part_matches_commutator(seed):
    rng = np.random.default_rng(seed)
    h, rho = random_hermitian(rng, 4), random_density(rng, 4)
    np.testing.assert_allclose(apply(hamiltonian_part(h), rho), -1j * (h @ rho - rho @ h), atol=1e-13)


def test_hamiltonian_part_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hamiltonian_part(np.array([[0, 1], [0, 0]]))


def test_empty_code_is_natural_dissipator():
    model = uniform_decay(2)
    code = AqecCode(2, [1, 0], [0, 1], (np.zeros((2, 2)),))
    np.testing.assert_array_equal(build_lindbladian(model, code), dissipator(model.natural_jumps[0]))


def test_lindbladian_is_sum_of_parts(rng):
    model = power_law(4, 0.3)
    code = init_random(model, OptimizerConfig(seed=5, num_induced_jumps=2))
    expected = (hamiltonian_part(code.control) + dissipator(model.natural_jumps[0])
                + dissipator(code.induced_jumps[0]) + dissipator(code.induced_jumps[1]))
    np.testing.assert_allclose(build_lindbladian(model, code), expected, atol=1e-14)


@pytest.mark.parametrize("model, code", [
    (uniform_decay(4), thirteen_code(1e6)),
    (photon_loss(5), binomial_code(1e6)),
    (uniform_decay(6), ladder_code(6, 1e6)),
])
def test_reference_generators_preserve_trace(model, code):
    L = build_lindbladian(model, code)
    n = model.dim
    row = vec(np.eye(n)).conj() @ L
    assert np.max(np.abs(row)) <= 1e-10


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        build_lindbladian(uniform_decay(3), thirteen_code(1.0))


def test_non_hermitian_control_rejected():
    code = thirteen_code(1.0)
    object.__setattr__(code, "control", np.triu(np.ones((4, 4))))
    with pytest.raises(ValueError):
        build_lindbladian(uniform_decay(4), code)


def test_propagate_zero_time_and_negative():
    L = build_lindbladian(uniform_decay(4), thirteen_code(10.0))
    assert np.array_equal(propagate(L, 0.0), np.eye(16))
    with pytest.raises(ValueError):
        propagate(L, -0.1)


def test_qubit_relaxation_population():
    L = build_lindbladian(uniform_decay(2), trivial_code(2))
    rho = apply(propagate(L, 1.0), np.diag([0.0, 1.0]))
    assert abs(rho[1, 1] - math.exp(-1)) < 1e-14
    assert abs(rho[0, 0] - (1 - math.exp(-1))) < 1e-14


@given(seeds)
def test_semigroup(seed):
    model, code, _ = random_instance(seed)
    L = build_lindbladian(model, code)
    np.testing.assert_allclose(propagate(L, 0.3) @ propagate(L, 0.7), propagate(L, 1.0), atol=1e-10)


@given(seeds, st.floats(0.0, 10.0))
def test_trace_preservation(seed, tau):
    model, code, rng = random_instance(seed)
    rho = apply(propagate(build_lindbladian(model, code), tau), random_density(rng, model.dim))
    assert abs(np.trace(rho) - 1) <= 1e-10


@given(seeds, st.floats(0.0, 10.0))
def test_hermiticity_preservation(seed, tau):
    model, code, rng = random_instance(seed)
    rho = apply(propagate(build_lindbladian(model, code), tau), random_hermitian(rng, model.dim))
    assert np.max(np.abs(rho - rho.conj().T)) <= 1e-10


@pytest.mark.parametrize("model, code", [
    (uniform_decay(4), thirteen_code(1e6)),
    (photon_loss(4), thirteen_code(1e6)),
    (photon_loss(5), binomial_code(1e6)),
    (power_law(5, 0.45), binomial_code(1e6)),
    (uniform_decay(6), ladder_code(6, 1e6)),
])
def test_positivity_spot_check(model, code, rng):
    P = propagate(build_lindbladian(model, code), 1.0)
    for _ in range(5):
        rho = apply(P, random_density(rng, model.dim))
        assert np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() >= -1e-9
