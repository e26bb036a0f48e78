"""Dense state-vector simulator.

Conventions used throughout the package:

* Qubit 0 is the least-significant bit of a basis-state integer, so the
  amplitude of ``|x>`` lives at array index ``x``.  Printed kets such as
  ``|x2 x1 x0>`` are a display convention only.
* States are complex128 arrays of length ``2**n_qubits`` and are treated as
  immutable after construction.
* All randomness goes through numpy's PCG64 generator seeded explicitly, so
  every stochastic operation is bit-reproducible from its seed.

The hard cap of 24 qubits keeps a state below 256 MB.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, CircuitError, NotDeterministicError

MAX_QUBITS = 24

NORM_ATOL = 1e-9

# Gate kinds.  Controlled kinds list the control(s) first in ``qubits``.
X = "x"
H = "h"
RY = "ry"
PHASE = "p"
CNOT = "cnot"
CP = "cp"
SWAP = "swap"
CRY = "cry"
MULTIPLEXED_RY = "mry"
PERMUTATION = "perm"

_SQRT1_2 = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class Gate:
    """A single gate.

    ``qubits`` holds the wires the gate acts on.  For controlled kinds the
    control comes first; for ``mry`` the layout is ``(*controls, target)``
    and ``angles[j]`` is the RY angle applied when the control bits, read
    with ``qubits[0]`` as the least-significant, equal ``j``.  For ``perm``
    the ``table`` maps local basis indices (bit ``i`` = ``qubits[i]``) to
    local basis indices and must be a bijection.
    """

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    angles: tuple[float, ...] | None = None
    table: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"gate {self.kind} repeats a qubit: {self.qubits}")
        if self.kind == MULTIPLEXED_RY:
            k = len(self.qubits) - 1
            if self.angles is None or len(self.angles) != 1 << k:
                raise CircuitError(
                    f"mry with {k} controls needs {1 << k} angles, "
                    f"got {0 if self.angles is None else len(self.angles)}"
                )
        if self.kind == PERMUTATION:
            dim = 1 << len(self.qubits)
            if self.table is None or sorted(self.table) != list(range(dim)):
                raise CircuitError("permutation table must be a bijection on basis indices")

    def inverse(self) -> "Gate":
        """The adjoint gate (same kind family)."""
        if self.kind in (X, H, CNOT, SWAP):
            return self
        if self.kind in (RY, PHASE, CP, CRY):
            return Gate(self.kind, self.qubits, angle=-self.angle)
        if self.kind == MULTIPLEXED_RY:
            return Gate(self.kind, self.qubits, angles=tuple(-a for a in self.angles))
        if self.kind == PERMUTATION:
            inv = [0] * len(self.table)
            for src, dst in enumerate(self.table):
                inv[dst] = src
            return Gate(self.kind, self.qubits, table=tuple(inv))
        raise CircuitError(f"unknown gate kind {self.kind!r}")


def x(q: int) -> Gate:
    return Gate(X, (q,))


def h(q: int) -> Gate:
    return Gate(H, (q,))


def ry(theta: float, q: int) -> Gate:
    return Gate(RY, (q,), angle=float(theta))


def p(theta: float, q: int) -> Gate:
    return Gate(PHASE, (q,), angle=float(theta))


def cnot(control: int, target: int) -> Gate:
    return Gate(CNOT, (control, target))


def cp(theta: float, control: int, target: int) -> Gate:
    return Gate(CP, (control, target), angle=float(theta))


def swap(a: int, b: int) -> Gate:
    return Gate(SWAP, (a, b))


def cry(theta: float, control: int, target: int) -> Gate:
    return Gate(CRY, (control, target), angle=float(theta))


def multiplexed_ry(angles: Sequence[float], controls: Sequence[int], target: int) -> Gate:
    return Gate(MULTIPLEXED_RY, (*controls, target), angles=tuple(float(a) for a in angles))


def permutation(table: Sequence[int], qubits: Sequence[int]) -> Gate:
    return Gate(PERMUTATION, tuple(qubits), table=tuple(int(i) for i in table))


def _ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def gate_matrix(gate: Gate) -> np.ndarray:
    """Local unitary of ``gate`` with local bit ``i`` = ``gate.qubits[i]``."""
    if gate.kind == X:
        return np.array([[0, 1], [1, 0]], dtype=np.complex128)
    if gate.kind == H:
        return np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=np.complex128)
    if gate.kind == RY:
        return _ry_matrix(gate.angle)
    if gate.kind == PHASE:
        return np.diag([1.0, np.exp(1j * gate.angle)]).astype(np.complex128)
    dim = 1 << len(gate.qubits)
    u = np.zeros((dim, dim), dtype=np.complex128)
    if gate.kind == PERMUTATION:
        for src, dst in enumerate(gate.table):
            u[dst, src] = 1.0
        return u
    if gate.kind == CNOT:
        for b in range(dim):  # bit 0 = control, bit 1 = target
            u[b ^ 2 if b & 1 else b, b] = 1.0
        return u
    if gate.kind == SWAP:
        for b in range(dim):
            lo, hi = b & 1, (b >> 1) & 1
            u[lo << 1 | hi, b] = 1.0
        return u
    if gate.kind in (CP, CRY):
        sub = (
            np.diag([1.0, np.exp(1j * gate.angle)]).astype(np.complex128)
            if gate.kind == CP
            else _ry_matrix(gate.angle)
        )
        for b in range(dim):
            if b & 1 == 0:
                u[b, b] = 1.0
        # control = bit 0 set: 2x2 block on target bit 1
        u[1, 1], u[1, 3] = sub[0, 0], sub[0, 1]
        u[3, 1], u[3, 3] = sub[1, 0], sub[1, 1]
        return u
    if gate.kind == MULTIPLEXED_RY:
        k = len(gate.qubits) - 1
        for j in range(1 << k):
            sub = _ry_matrix(gate.angles[j])
            i0 = j  # controls in low bits, target = bit k
            i1 = j | (1 << k)
            u[i0, i0], u[i0, i1] = sub[0, 0], sub[0, 1]
            u[i1, i0], u[i1, i1] = sub[1, 0], sub[1, 1]
        return u
    raise CircuitError(f"unknown gate kind {gate.kind!r}")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over ``n_qubits`` wires with named registers.

    ``query_count`` counts oracle queries declared by circuit builders (e.g.
    a simulated qRAM access); it is not derived from the gate list.
    """

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    registers: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    query_count: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise CircuitError(f"gate {g.kind} touches qubit outside 0..{self.n_qubits - 1}")
        regs = {k: tuple(v) for k, v in dict(self.registers).items()}
        seen: set[int] = set()
        for name, qs in regs.items():
            if any(q < 0 or q >= self.n_qubits for q in qs):
                raise CircuitError(f"register {name!r} outside circuit width")
            if seen & set(qs):
                raise CircuitError(f"register {name!r} overlaps another register")
            seen |= set(qs)
        object.__setattr__(self, "registers", regs)

    @property
    def width(self) -> int:
        return self.n_qubits

    @property
    def depth(self) -> int:
        """Longest chain of gates sharing qubits (greedy layering)."""
        level = [0] * self.n_qubits
        deepest = 0
        for g in self.gates:
            d = 1 + max(level[q] for q in g.qubits)
            for q in g.qubits:
                level[q] = d
            deepest = max(deepest, d)
        return deepest

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == CNOT)

    def concat(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise CircuitError("cannot concatenate circuits of different widths")
        return Circuit(
            self.n_qubits,
            self.gates + other.gates,
            self.registers or other.registers,
            self.query_count + other.query_count,
        )

    def inverse(self) -> "Circuit":
        return Circuit(
            self.n_qubits,
            tuple(g.inverse() for g in reversed(self.gates)),
            self.registers,
            self.query_count,
        )

    def shifted(self, offset: int, n_qubits: int) -> "Circuit":
        """The same gates embedded at ``offset`` in a ``n_qubits``-wide circuit."""
        gates = tuple(
            Gate(g.kind, tuple(q + offset for q in g.qubits), g.angle, g.angles, g.table)
            for g in self.gates
        )
        regs = {k: tuple(q + offset for q in v) for k, v in self.registers.items()}
        return Circuit(n_qubits, gates, regs, self.query_count)


@dataclass(frozen=True)
class StateVector:
    """A normalized pure state over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise CircuitError(
                f"state over {self.n_qubits} qubits needs {1 << self.n_qubits} amplitudes"
            )
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class ShotRecord:
    """One measurement shot: outcome per register, plus provenance."""

    measured_bits: Mapping[str, int]
    shot_index: int
    seed: int


def zero_state(n: int) -> StateVector:
    """The all-zeros state ``|0...0>`` on ``n`` qubits, 1 <= n <= 24."""
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside 1..{MAX_QUBITS}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def basis_state(n: int, index: int) -> StateVector:
    """The computational basis state ``|index>`` on ``n`` qubits."""
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside 1..{MAX_QUBITS}")
    if not 0 <= index < (1 << n):
        raise CapacityError(f"basis index {index} outside 0..{(1 << n) - 1}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n, amps)


def state_from_amplitudes(amps: Sequence[complex]) -> StateVector:
    arr = np.asarray(amps, dtype=np.complex128)
    n = int(arr.size).bit_length() - 1
    if 1 << n != arr.size:
        raise CircuitError(f"amplitude count {arr.size} is not a power of two")
    return StateVector(n, arr)


def _apply_1q(psi: np.ndarray, q: int, u: np.ndarray) -> np.ndarray:
    view = psi.reshape(-1, 2, 1 << q)
    out = np.empty_like(view)
    out[:, 0, :] = u[0, 0] * view[:, 0, :] + u[0, 1] * view[:, 1, :]
    out[:, 1, :] = u[1, 0] * view[:, 0, :] + u[1, 1] * view[:, 1, :]
    return out.reshape(psi.shape)


def _pair_indices(n: int, target: int, fixed_ones: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    """Indices (i0, i1) differing in ``target``, with all ``fixed_ones`` bits set."""
    idx = np.arange(1 << n)
    mask = (idx >> target) & 1 == 0
    for c in fixed_ones:
        mask &= (idx >> c) & 1 == 1
    i0 = idx[mask]
    return i0, i0 | (1 << target)


@lru_cache(maxsize=128)
def _perm_destinations(table: tuple[int, ...], qubits: tuple[int, ...], n: int) -> np.ndarray:
    src = np.arange(1 << n)
    local = np.zeros(1 << n, dtype=np.int64)
    for i, q in enumerate(qubits):
        local |= ((src >> q) & 1) << i
    new_local = np.asarray(table, dtype=np.int64)[local]
    dest = src.copy()
    for i, q in enumerate(qubits):
        bit = (new_local >> i) & 1
        dest = (dest & ~(1 << q)) | (bit << q)
    return dest


def apply_gate(psi: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Apply one gate to a raw amplitude array, returning a new array."""
    kind = gate.kind
    if kind in (X, H, RY, PHASE):
        return _apply_1q(psi, gate.qubits[0], gate_matrix(gate))
    if kind == CNOT:
        c, t = gate.qubits
        i0, i1 = _pair_indices(n, t, (c,))
        out = psi.copy()
        out[i0], out[i1] = psi[i1], psi[i0]
        return out
    if kind == SWAP:
        a, b = gate.qubits
        idx = np.arange(1 << n)
        sel = ((idx >> a) & 1) != ((idx >> b) & 1)
        out = psi.copy()
        out[idx[sel] ^ ((1 << a) | (1 << b))] = psi[idx[sel]]
        return out
    if kind in (CP, CRY):
        c, t = gate.qubits
        sub = (
            np.diag([1.0, np.exp(1j * gate.angle)]).astype(np.complex128)
            if kind == CP
            else _ry_matrix(gate.angle)
        )
        i0, i1 = _pair_indices(n, t, (c,))
        out = psi.copy()
        a0, a1 = psi[i0], psi[i1]
        out[i0] = sub[0, 0] * a0 + sub[0, 1] * a1
        out[i1] = sub[1, 0] * a0 + sub[1, 1] * a1
        return out
    if kind == MULTIPLEXED_RY:
        controls, t = gate.qubits[:-1], gate.qubits[-1]
        idx = np.arange(1 << n)
        patt = np.zeros(1 << n, dtype=np.int64)
        for i, c in enumerate(controls):
            patt |= ((idx >> c) & 1) << i
        out = psi.copy()
        t0 = (idx >> t) & 1 == 0
        for j in range(1 << len(controls)):
            i0 = idx[t0 & (patt == j)]
            i1 = i0 | (1 << t)
            sub = _ry_matrix(gate.angles[j])
            a0, a1 = psi[i0], psi[i1]
            out[i0] = sub[0, 0] * a0 + sub[0, 1] * a1
            out[i1] = sub[1, 0] * a0 + sub[1, 1] * a1
        return out
    if kind == PERMUTATION:
        dest = _perm_destinations(gate.table, gate.qubits, n)
        out = np.empty_like(psi)
        out[dest] = psi
        return out
    raise CircuitError(f"unknown gate kind {kind!r}")


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Run ``circuit`` on ``state``; norm is preserved to 1e-9."""
    if circuit.n_qubits != state.n_qubits:
        raise CircuitError(
            f"circuit width {circuit.n_qubits} != state width {state.n_qubits}"
        )
    psi = np.array(state.amplitudes, dtype=np.complex128)
    for g in circuit.gates:
        psi = apply_gate(psi, g, state.n_qubits)
    return StateVector(state.n_qubits, psi)


def run(circuit: Circuit) -> StateVector:
    """Shorthand for applying ``circuit`` to ``|0...0>``."""
    return apply_circuit(zero_state(circuit.n_qubits), circuit)


def build_unitary(circuit: Circuit) -> np.ndarray:
    """Full ``2**n x 2**n`` matrix of ``circuit`` (small circuits only)."""
    dim = 1 << circuit.n_qubits
    cols = []
    for b in range(dim):
        cols.append(apply_circuit(basis_state(circuit.n_qubits, b), circuit).amplitudes)
    return np.stack(cols, axis=1)


def marginal_probabilities(state: StateVector, register: Sequence[int]) -> np.ndarray:
    """Outcome distribution of ``register``; bit ``j`` of the outcome is
    ``register[j]``."""
    register = tuple(register)
    if not register:
        raise CircuitError("marginal over an empty register")
    if any(q < 0 or q >= state.n_qubits for q in register):
        raise CircuitError("register qubit outside state width")
    if len(set(register)) != len(register):
        raise CircuitError("register repeats a qubit")
    idx = np.arange(1 << state.n_qubits)
    key = np.zeros(idx.size, dtype=np.int64)
    for j, q in enumerate(register):
        key |= ((idx >> q) & 1) << j
    probs = np.abs(state.amplitudes) ** 2
    return np.bincount(key, weights=probs, minlength=1 << len(register))


def sample_shots(
    state: StateVector,
    registers: Mapping[str, Sequence[int]],
    shots: int,
    seed: int,
) -> list[ShotRecord]:
    """Draw ``shots`` i.i.d. outcomes; identical ``(seed, shots)`` reproduce
    identical records bit for bit."""
    if shots < 1:
        raise CircuitError("shots must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    probs = np.abs(state.amplitudes) ** 2
    probs = probs / probs.sum()
    draws = rng.choice(probs.size, size=shots, p=probs)
    records = []
    for i, full in enumerate(draws):
        bits = {}
        for name, qs in registers.items():
            out = 0
            for j, q in enumerate(qs):
                out |= ((int(full) >> q) & 1) << j
            bits[name] = out
        records.append(ShotRecord(bits, i, seed))
    return records


def fidelity(a: StateVector, b: StateVector) -> float:
    """``|<a|b>|**2``; 1 iff the states agree up to global phase."""
    if a.n_qubits != b.n_qubits:
        raise CircuitError("fidelity of states with different qubit counts")
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def spawn_seeds(seed: int, count: int) -> list[int]:
    """Derive ``count`` independent child seeds from ``seed`` (SeedSequence)."""
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(count)]
