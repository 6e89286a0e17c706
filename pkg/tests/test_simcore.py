import math

import numpy as np
import pytest

from paulicloner.simcore import (
    Circuit,
    DensityMatrix,
    GateOp,
    StateVector,
    apply_circuit,
    basis_state,
    fidelity_pure,
    inject_state,
    partial_trace,
    reduced_density_matrix,
)

S2 = 1 / math.sqrt(2)


def random_circuit(rng, n, depth=12):
    gates = ["H", "X", "Z", "S", "RX", "RY", "RZ", "CNOT", "CCNOT", "CRY"]
    ops = []
    while len(ops) < depth:
        name = gates[rng.integers(len(gates))]
        arity = {"CNOT": 2, "CRY": 2, "CCNOT": 3}.get(name, 1)
        if arity > n:
            continue
        qubits = tuple(rng.choice(n, size=arity, replace=False).tolist())
        angle = float(rng.uniform(-math.pi, math.pi))
        needs_angle = name in ("RX", "RY", "RZ", "CRY")
        cv = int(rng.integers(2)) if name == "CRY" else 1
        ops.append(GateOp(name, qubits, angle if needs_angle else None, cv))
    return Circuit(n, tuple(ops))


def random_state(rng, n):
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return StateVector(n, v / np.linalg.norm(v))


class TestBasisState:
    def test_single_qubit_zero(self):
        np.testing.assert_array_equal(basis_state(1, 0).amplitudes, [1, 0])

    def test_two_qubit_index_three(self):
        np.testing.assert_array_equal(basis_state(2, 3).amplitudes, [0, 0, 0, 1])

    def test_four_qubit_index_five(self):
        amps = basis_state(4, 5).amplitudes
        assert amps[5] == 1 and np.count_nonzero(amps) == 1 and amps.size == 16

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            basis_state(2, 4)
        with pytest.raises(ValueError):
            basis_state(2, -1)


class TestApplyCircuit:
    def test_hadamard(self):
        out = apply_circuit(basis_state(1, 0), Circuit(1, (GateOp("H", (0,)),)))
        np.testing.assert_allclose(out.amplitudes, [S2, S2], atol=1e-15)

    def test_cnot_flips_target(self):
        # |10>: control qubit 0 set, so target flips to give |11>
        out = apply_circuit(basis_state(2, 2), Circuit(2, (GateOp("CNOT", (0, 1)),)))
        np.testing.assert_allclose(out.amplitudes, basis_state(2, 3).amplitudes)

    def test_three_qubit_hardware_matches_matrix_product(self):
        # oracle: assemble the same circuit as one explicit 8x8 matrix product
        ops = (
            GateOp("H", (1,)),
            GateOp("CNOT", (0, 1)),
            GateOp("CNOT", (2, 0)),
            GateOp("CNOT", (1, 2)),
        )
        h = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
        cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
        i2 = np.eye(2)
        m_h1 = np.kron(np.kron(i2, h), i2)
        m_c01 = np.kron(cnot, i2)

        def cnot_matrix(control, target):
            m = np.zeros((8, 8))
            for idx in range(8):
                q = [(idx >> 2) & 1, (idx >> 1) & 1, idx & 1]
                q[target] ^= q[control]
                m[(q[0] << 2) | (q[1] << 1) | q[2], idx] = 1
            return m

        full = cnot_matrix(1, 2) @ cnot_matrix(2, 0) @ m_c01 @ m_h1
        rng = np.random.default_rng(0)
        state = random_state(rng, 3)
        got = apply_circuit(state, Circuit(3, ops))
        np.testing.assert_allclose(got.amplitudes, full @ state.amplitudes, atol=1e-12)

    def test_hardware_on_zero_program_leaves_input_alone(self):
        # program |00> on qubits 1, 2: qubit 0 passes through untouched
        ops = (
            GateOp("H", (1,)),
            GateOp("CNOT", (0, 1)),
            GateOp("CNOT", (2, 0)),
            GateOp("CNOT", (1, 2)),
        )
        rng = np.random.default_rng(1)
        alice = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        alice /= np.linalg.norm(alice)
        state = inject_state(basis_state(3, 0), (0,), alice)
        out = apply_circuit(state, Circuit(3, ops))
        rho0 = reduced_density_matrix(out, (0,))
        np.testing.assert_allclose(
            rho0.matrix, np.outer(alice, alice.conj()), atol=1e-12
        )

    def test_qubit_count_mismatch(self):
        with pytest.raises(ValueError):
            apply_circuit(basis_state(2, 0), Circuit(3, (GateOp("H", (0,)),)))


class TestPartialTrace:
    def test_bell_state_is_maximally_mixed(self):
        bell = StateVector(2, np.array([S2, 0, 0, S2]))
        rho = partial_trace(bell.to_density_matrix(), {0})
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-14)

    def test_keep_all_is_identity(self):
        rng = np.random.default_rng(2)
        rho = random_state(rng, 2).to_density_matrix()
        np.testing.assert_allclose(
            partial_trace(rho, {0, 1}).matrix, rho.matrix, atol=1e-14
        )

    def test_product_state(self):
        state = StateVector(2, np.array([S2, S2, 0, 0]))  # |0> (x) |+>
        rho = partial_trace(state.to_density_matrix(), {1})
        np.testing.assert_allclose(rho.matrix, np.full((2, 2), 0.5), atol=1e-14)

    def test_empty_keep_rejected(self):
        bell = StateVector(2, np.array([S2, 0, 0, S2]))
        with pytest.raises(ValueError):
            partial_trace(bell.to_density_matrix(), set())

    def test_trace_preserved_and_product_factor_recovered(self):
        rng = np.random.default_rng(3)
        a, b = random_state(rng, 2), random_state(rng, 1)
        joint = StateVector(3, np.kron(a.amplitudes, b.amplitudes))
        rho_a = partial_trace(joint.to_density_matrix(), {0, 1})
        np.testing.assert_allclose(
            rho_a.matrix, np.outer(a.amplitudes, a.amplitudes.conj()), atol=1e-12
        )
        assert abs(np.trace(rho_a.matrix) - 1) < 1e-12


class TestFidelityPure:
    def test_pure_match(self):
        zero = basis_state(1, 0)
        assert fidelity_pure(zero.to_density_matrix(), zero) == pytest.approx(1.0)

    def test_maximally_mixed(self):
        rho = DensityMatrix(1, np.eye(2) / 2)
        rng = np.random.default_rng(4)
        assert fidelity_pure(rho, random_state(rng, 1)) == pytest.approx(0.5)
        rho2 = DensityMatrix(2, np.eye(4) / 4)
        assert fidelity_pure(rho2, random_state(rng, 2)) == pytest.approx(0.25)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity_pure(DensityMatrix(1, np.eye(2) / 2), basis_state(2, 0))

    def test_linear_in_rho_and_phase_invariant(self):
        rng = np.random.default_rng(5)
        a, b = random_state(rng, 2), random_state(rng, 2)
        psi = random_state(rng, 2)
        lam = 0.3
        mixed = DensityMatrix(
            2,
            lam * a.to_density_matrix().matrix + (1 - lam) * b.to_density_matrix().matrix,
        )
        expect = lam * fidelity_pure(a.to_density_matrix(), psi) + (
            1 - lam
        ) * fidelity_pure(b.to_density_matrix(), psi)
        assert fidelity_pure(mixed, psi) == pytest.approx(expect, abs=1e-12)
        phased = StateVector(2, np.exp(0.7j) * psi.amplitudes)
        assert fidelity_pure(mixed, phased) == pytest.approx(
            fidelity_pure(mixed, psi), abs=1e-12
        )


class TestInjectState:
    def test_basis_program(self):
        out = inject_state(basis_state(2, 0), (0, 1), [1, 0, 0, 0])
        np.testing.assert_array_equal(out.amplitudes, basis_state(2, 0).amplitudes)

    def test_basis_vector_on_inner_register(self):
        amps = np.zeros(16)
        amps[5] = 1.0  # register pattern 0101
        out = inject_state(basis_state(6, 0), (2, 3, 4, 5), amps)
        # qubits (2,3,4,5) = (0,1,0,1) with qubits 0, 1 still zero
        expect_index = 0b000101
        assert out.amplitudes[expect_index] == 1

    def test_matches_rotation_preparation(self):
        # oracle: the three-rotation software block applied to |00>
        from paulicloner.cloner import NgAngles, ng_software_prep_circuit

        angles = NgAngles(math.pi / 4, math.pi / 4, math.pi / 4)
        prep = apply_circuit(basis_state(2, 0), ng_software_prep_circuit(angles))
        injected = inject_state(basis_state(2, 0), (0, 1), prep.amplitudes)
        np.testing.assert_allclose(injected.amplitudes, prep.amplitudes, atol=1e-14)
        cr = math.cos(math.pi / 4)
        expect = np.array(
            [cr * cr, cr * math.sin(math.pi / 4), math.sin(math.pi / 4) * cr, 0]
        )
        expect[3] = math.sin(math.pi / 4) * math.sin(math.pi / 4)
        np.testing.assert_allclose(prep.amplitudes, expect, atol=1e-14)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            inject_state(basis_state(2, 0), (0, 1), [1, 1, 0, 0])

    def test_rejects_occupied_register(self):
        occupied = basis_state(2, 1)
        with pytest.raises(ValueError):
            inject_state(occupied, (1,), [1, 0])


class TestInvariants:
    def test_norm_preserved_on_random_circuits(self):
        rng = np.random.default_rng(6)
        for _ in range(1000):
            n = int(rng.integers(2, 5))
            circuit = random_circuit(rng, n)
            out = apply_circuit(random_state(rng, n), circuit)
            assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-10

    def test_circuit_inverse_returns_input(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(2, 5))
            circuit = random_circuit(rng, n)
            state = random_state(rng, n)
            back = apply_circuit(apply_circuit(state, circuit), circuit.inverse())
            np.testing.assert_allclose(back.amplitudes, state.amplitudes, atol=1e-10)


class TestValidation:
    def test_state_vector_must_be_normalized(self):
        with pytest.raises(ValueError):
            StateVector(1, np.array([1.0, 1.0]))

    def test_density_matrix_checks(self):
        with pytest.raises(ValueError):
            DensityMatrix(1, np.array([[1.0, 0.5], [0.2, 0.0]]))  # not Hermitian
        with pytest.raises(ValueError):
            DensityMatrix(1, np.eye(2))  # trace 2
        with pytest.raises(ValueError):
            DensityMatrix(1, np.diag([1.5, -0.5]))  # negative eigenvalue

    def test_gate_op_validation(self):
        with pytest.raises(ValueError):
            GateOp("CNOT", (0, 0))
        with pytest.raises(ValueError):
            GateOp("RY", (0,))
        with pytest.raises(ValueError):
            GateOp("FOO", (0,))

    def test_amplitudes_are_read_only(self):
        state = basis_state(2, 1)
        with pytest.raises(ValueError):
            state.amplitudes[0] = 1.0
