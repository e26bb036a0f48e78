"""Core simulator tests.

The independent oracle here builds the full matrix of every gate via
explicit Kronecker products (``kron_embed``) and multiplies it out, never
going through the simulator's in-place bit-sliced application.
"""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from enqode import sim
from enqode.errors import CapacityError, CircuitError

RNG = np.random.default_rng(20240811)


def kron_embed(local: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """Embed a local unitary (bit i = qubits[i]) into the full 2^n space."""
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=np.complex128)
    rest = [q for q in range(n) if q not in qubits]
    for col in range(dim):
        loc = 0
        for i, q in enumerate(qubits):
            loc |= ((col >> q) & 1) << i
        for loc_out in range(local.shape[0]):
            amp = local[loc_out, loc]
            if amp == 0:
                continue
            row = 0
            for i, q in enumerate(qubits):
                row |= ((loc_out >> i) & 1) << q
            for q in rest:
                row |= ((col >> q) & 1) << q
            full[row, col] += amp
    return full


def oracle_apply(state: np.ndarray, circuit: sim.Circuit) -> np.ndarray:
    psi = state.copy()
    for g in circuit.gates:
        psi = kron_embed(sim.gate_matrix(g), g.qubits, circuit.n_qubits) @ psi
    return psi


def random_gate(rng, n: int) -> sim.Gate:
    kind = rng.choice(["x", "h", "ry", "p", "cnot", "cp", "swap", "cry", "mry", "perm"])
    qs = rng.permutation(n)
    if kind in ("x", "h"):
        return sim.Gate(kind, (int(qs[0]),))
    if kind in ("ry", "p"):
        return sim.Gate(kind, (int(qs[0]),), angle=float(rng.uniform(-np.pi, np.pi)))
    if kind in ("cnot", "swap"):
        return sim.Gate(kind, (int(qs[0]), int(qs[1])))
    if kind in ("cp", "cry"):
        return sim.Gate(kind, (int(qs[0]), int(qs[1])), angle=float(rng.uniform(-np.pi, np.pi)))
    if kind == "mry":
        k = int(rng.integers(1, min(3, n)))
        return sim.multiplexed_ry(
            rng.uniform(-np.pi, np.pi, size=1 << k), [int(q) for q in qs[:k]], int(qs[k])
        )
    k = int(rng.integers(1, min(4, n + 1)))
    table = rng.permutation(1 << k)
    return sim.permutation([int(t) for t in table], [int(q) for q in qs[:k]])


def random_state(rng, n: int) -> sim.StateVector:
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return sim.StateVector(n, amps / np.linalg.norm(amps))


class TestZeroState:
    def test_one_qubit(self):
        np.testing.assert_array_equal(sim.zero_state(1).amplitudes, [1, 0])

    def test_two_qubits(self):
        np.testing.assert_array_equal(sim.zero_state(2).amplitudes, [1, 0, 0, 0])

    def test_cap(self):
        with pytest.raises(CapacityError):
            sim.zero_state(25)
        with pytest.raises(CapacityError):
            sim.zero_state(0)


class TestApplyCircuit:
    def test_hadamard(self):
        c = sim.Circuit(1, [sim.h(0)])
        out = sim.apply_circuit(sim.zero_state(1), c)
        np.testing.assert_allclose(out.amplitudes, [2**-0.5, 2**-0.5], atol=1e-12)

    def test_empty_circuit_is_identity(self):
        s = random_state(RNG, 3)
        out = sim.apply_circuit(s, sim.Circuit(3))
        np.testing.assert_array_equal(out.amplitudes, s.amplitudes)

    def test_bell_state_matches_hand_matrix_product(self):
        # 4x4 oracle: CNOT(0->1) . (I (x) H) applied to e_0.
        h_full = kron_embed(sim.gate_matrix(sim.h(0)), (0,), 2)
        cx_full = kron_embed(sim.gate_matrix(sim.cnot(0, 1)), (0, 1), 2)
        expected = cx_full @ h_full @ np.array([1, 0, 0, 0], dtype=np.complex128)
        c = sim.Circuit(2, [sim.h(0), sim.cnot(0, 1)])
        out = sim.apply_circuit(sim.zero_state(2), c)
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)
        np.testing.assert_allclose(out.amplitudes, [2**-0.5, 0, 0, 2**-0.5], atol=1e-12)

    def test_width_mismatch(self):
        with pytest.raises(CircuitError):
            sim.apply_circuit(sim.zero_state(2), sim.Circuit(3, [sim.x(0)]))

    def test_every_kind_matches_kron_oracle(self):
        for trial in range(60):
            n = int(RNG.integers(2, 5))
            s = random_state(RNG, n)
            c = sim.Circuit(n, [random_gate(RNG, n) for _ in range(6)])
            np.testing.assert_allclose(
                sim.apply_circuit(s, c).amplitudes,
                oracle_apply(np.array(s.amplitudes), c),
                atol=1e-10,
            )


class TestGateUnitarity:
    @pytest.mark.parametrize("kind", ["x", "h", "ry", "p", "cnot", "cp", "swap", "cry", "mry", "perm"])
    def test_unitary(self, kind):
        rng = np.random.default_rng(5)
        for n in (2, 3, 4):
            for _ in range(8):
                g = random_gate(rng, n)
                if g.kind != kind:
                    continue
                u = kron_embed(sim.gate_matrix(g), g.qubits, n)
                np.testing.assert_allclose(u @ u.conj().T, np.eye(1 << n), atol=1e-10)

    def test_permutation_rejects_non_bijection(self):
        with pytest.raises(CircuitError):
            sim.permutation([0, 0, 1, 2], [0, 1])


class TestNormAndComposition:
    def test_norm_preserved_on_random_circuits(self):
        rng = np.random.default_rng(77)
        for _ in range(1000):
            n = int(rng.integers(2, 11))
            s = random_state(rng, n)
            c = sim.Circuit(n, [random_gate(rng, n) for _ in range(int(rng.integers(1, 51)))])
            assert abs(sim.apply_circuit(s, c).norm_sq - 1.0) <= 1e-9

    def test_composition(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            n = int(rng.integers(2, 6))
            s = random_state(rng, n)
            c1 = sim.Circuit(n, [random_gate(rng, n) for _ in range(5)])
            c2 = sim.Circuit(n, [random_gate(rng, n) for _ in range(5)])
            joined = sim.apply_circuit(s, c1.concat(c2))
            stepped = sim.apply_circuit(sim.apply_circuit(s, c1), c2)
            np.testing.assert_allclose(joined.amplitudes, stepped.amplitudes, atol=1e-10)

    def test_inverse_undoes(self):
        rng = np.random.default_rng(99)
        for _ in range(20):
            n = int(rng.integers(2, 5))
            s = random_state(rng, n)
            c = sim.Circuit(n, [random_gate(rng, n) for _ in range(8)])
            back = sim.apply_circuit(sim.apply_circuit(s, c), c.inverse())
            np.testing.assert_allclose(back.amplitudes, s.amplitudes, atol=1e-10)


class TestMarginals:
    def test_bell_single_qubit(self):
        bell = sim.state_from_amplitudes([2**-0.5, 0, 0, 2**-0.5])
        np.testing.assert_allclose(sim.marginal_probabilities(bell, [0]), [0.5, 0.5], atol=1e-12)

    def test_basis_state_full_register(self):
        np.testing.assert_allclose(
            sim.marginal_probabilities(sim.zero_state(2), [0, 1]), [1, 0, 0, 0], atol=1e-12
        )

    def test_uniform_marginal(self):
        uniform = sim.state_from_amplitudes([0.5] * 4)
        np.testing.assert_allclose(sim.marginal_probabilities(uniform, [1]), [0.5, 0.5], atol=1e-12)

    def test_sums_to_one(self):
        s = random_state(RNG, 5)
        assert abs(sim.marginal_probabilities(s, [1, 3, 4]).sum() - 1.0) < 1e-9

    def test_empty_register(self):
        with pytest.raises(CircuitError):
            sim.marginal_probabilities(sim.zero_state(2), [])

    def test_brute_force_agreement(self):
        s = random_state(RNG, 4)
        reg = (2, 0)
        expected = np.zeros(4)
        for idx, amp in enumerate(s.amplitudes):
            k = ((idx >> 2) & 1) | (((idx >> 0) & 1) << 1)
            expected[k] += abs(amp) ** 2
        np.testing.assert_allclose(sim.marginal_probabilities(s, reg), expected, atol=1e-12)


class TestSampling:
    def test_deterministic_state(self):
        s = sim.basis_state(2, 1)  # |01>
        recs = sim.sample_shots(s, {"r": (0, 1)}, 20, seed=3)
        assert all(r.measured_bits["r"] == 1 for r in recs)

    def test_uniform_frequency(self):
        s = sim.state_from_amplitudes([2**-0.5, 2**-0.5])
        recs = sim.sample_shots(s, {"q": (0,)}, 100_000, seed=42)
        freq = sum(r.measured_bits["q"] for r in recs) / 100_000
        assert 0.494 <= freq <= 0.506  # 3 sigma of binomial(1e5, .5)

    def test_same_seed_identical(self):
        s = random_state(RNG, 3)
        a = sim.sample_shots(s, {"q": (0, 1, 2)}, 50, seed=7)
        b = sim.sample_shots(s, {"q": (0, 1, 2)}, 50, seed=7)
        assert [r.measured_bits for r in a] == [r.measured_bits for r in b]

    def test_frequencies_match_marginals(self):
        s = random_state(np.random.default_rng(4), 3)
        reg = (0, 2)
        recs = sim.sample_shots(s, {"r": reg}, 1_000_000, seed=11)
        counts = np.bincount([r.measured_bits["r"] for r in recs], minlength=4)
        probs = sim.marginal_probabilities(s, reg)
        sigma = np.sqrt(probs * (1 - probs) / 1_000_000)
        assert np.all(np.abs(counts / 1_000_000 - probs) <= 4 * sigma + 1e-12)


class TestFidelity:
    def test_self(self):
        s = random_state(RNG, 3)
        assert sim.fidelity(s, s) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert sim.fidelity(sim.basis_state(1, 0), sim.basis_state(1, 1)) == 0.0

    def test_half(self):
        plus = sim.state_from_amplitudes([2**-0.5, 2**-0.5])
        assert sim.fidelity(sim.basis_state(1, 0), plus) == pytest.approx(0.5)

    def test_global_phase_invariant(self):
        s = random_state(RNG, 2)
        rotated = sim.StateVector(2, np.exp(0.7j) * s.amplitudes)
        assert sim.fidelity(s, rotated) == pytest.approx(1.0)

    def test_shape_mismatch(self):
        with pytest.raises(CircuitError):
            sim.fidelity(sim.zero_state(1), sim.zero_state(2))


class TestCircuitMetrics:
    def test_depth_is_longest_chain(self):
        c = sim.Circuit(3, [sim.h(0), sim.h(1), sim.cnot(0, 1), sim.x(2)])
        assert c.depth == 2
        assert sim.Circuit(2).depth == 0

    def test_cnot_count(self):
        c = sim.Circuit(2, [sim.cnot(0, 1), sim.h(0), sim.cnot(1, 0)])
        assert c.cnot_count == 2

    def test_register_overlap_rejected(self):
        with pytest.raises(CircuitError):
            sim.Circuit(3, [], registers={"a": (0, 1), "b": (1, 2)})

    def test_gate_outside_width_rejected(self):
        with pytest.raises(CircuitError):
            sim.Circuit(2, [sim.x(5)])


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=2**31))
def test_norm_preserved_property(n, seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, n)
    gates = [random_gate(rng, n) for _ in range(10)] if n >= 2 else [sim.h(0), sim.ry(0.3, 0)]
    out = sim.apply_circuit(s, sim.Circuit(n, gates))
    assert abs(out.norm_sq - 1.0) <= 1e-9
