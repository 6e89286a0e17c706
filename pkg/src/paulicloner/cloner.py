"""Niu-Griffiths and QID cloning circuits and end-to-end fidelity evaluation.

Register layout for a cloner on N-qubit inputs (3N qubits total):

  qubits 0 .. N-1    Alice's input, which becomes Bob's clone
  qubits N .. 2N-1   Eve's clone
  qubits 2N .. 3N-1  ancilla

The program ("software") state lives on Eve's clone register plus the
ancilla, Eve's qubits being the most significant program bits.  Programs are
loaded by direct amplitude injection rather than by a preparation circuit;
the three-rotation preparation for single-qubit registers is provided
separately for cross-checks.

Noise is modelled as a Pauli channel acting on Alice's register after state
preparation and before the cloning hardware; each Kraus branch is run
through the pure-state simulator and the resulting Bob/Eve reduced states
are mixed with the branch weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import simcore
from .mub import MubBasis, MubSet, index_to_pauli, mubs_for
from .noise import PauliChannel
from .simcore import (
    Circuit,
    DensityMatrix,
    GateOp,
    StateVector,
    basis_state,
    fidelity_pure,
    inject_state,
    reduced_density_matrix,
)

PROGRAM_NORM_TOL = 1e-9


class ClonerKind(Enum):
    NG = "ng"
    QID = "qid"


@dataclass(frozen=True)
class SoftwareState:
    """The cloner program: a normalized vector of 4^N amplitudes."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = round(math.log(amps.size, 4))
        if 4**n != amps.size or n < 1:
            raise ValueError(f"program length {amps.size} is not a power of 4")
        if abs(np.linalg.norm(amps) - 1.0) > PROGRAM_NORM_TOL:
            raise ValueError("program state is not normalized")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_clone_qubits(self) -> int:
        return round(math.log(self.amplitudes.size, 4))

    @property
    def num_register_qubits(self) -> int:
        return 2 * self.num_clone_qubits

    @property
    def is_real(self) -> bool:
        return bool(np.max(np.abs(self.amplitudes.imag)) < 1e-12)

    @classmethod
    def computational(cls, num_clone_qubits: int, index: int = 0) -> "SoftwareState":
        amps = np.zeros(4**num_clone_qubits)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class NgAngles:
    """Three-angle parameterization of a real single-qubit program state."""

    rho: float
    phi: float
    theta: float

    def to_program(self) -> SoftwareState:
        return ng_angles_to_program(self)


def ng_angles_to_program(angles: NgAngles) -> SoftwareState:
    """(cos(theta)cos(rho), cos(phi)sin(rho), sin(theta)cos(rho), sin(phi)sin(rho))."""
    cr, sr = math.cos(angles.rho), math.sin(angles.rho)
    return SoftwareState(
        np.array(
            [
                math.cos(angles.theta) * cr,
                math.cos(angles.phi) * sr,
                math.sin(angles.theta) * cr,
                math.sin(angles.phi) * sr,
            ]
        )
    )


def ng_software_prep_circuit(angles: NgAngles) -> Circuit:
    """Three-rotation preparation of the program on a 2-qubit register.

    Qubit 0 is the one that joins Eve's clone register, qubit 1 the ancilla.
    Simulating this block on |00> reproduces ng_angles_to_program exactly.
    """
    return Circuit(
        2,
        (
            GateOp("RY", (1,), 2 * angles.rho),
            GateOp("CRY", (1, 0), 2 * angles.phi, control_value=1),
            GateOp("CRY", (1, 0), 2 * angles.theta, control_value=0),
        ),
    )


@dataclass(frozen=True)
class ClonerLayout:
    num_clone_qubits: int

    @property
    def num_qubits(self) -> int:
        return 3 * self.num_clone_qubits

    @property
    def alice(self) -> tuple[int, ...]:
        return tuple(range(self.num_clone_qubits))

    @property
    def eve(self) -> tuple[int, ...]:
        return tuple(range(self.num_clone_qubits, 2 * self.num_clone_qubits))

    @property
    def ancilla(self) -> tuple[int, ...]:
        return tuple(range(2 * self.num_clone_qubits, 3 * self.num_clone_qubits))

    @property
    def software(self) -> tuple[int, ...]:
        return self.eve + self.ancilla


def _check_program(num_clone_qubits: int, program: SoftwareState) -> None:
    if program.num_clone_qubits != num_clone_qubits:
        raise ValueError(
            f"program for {program.num_clone_qubits}-qubit registers, "
            f"cloner built for {num_clone_qubits}"
        )


def build_ng(num_clone_qubits: int, program: SoftwareState) -> Circuit:
    """Niu-Griffiths hardware: H on Eve's register, then three bitwise CNOT layers.

    Layer order: Alice -> Eve, ancilla -> Alice, Eve -> ancilla, ascending
    qubit index inside each layer.  The program is injected onto the software
    register at state preparation time.
    """
    _check_program(num_clone_qubits, program)
    lay = ClonerLayout(num_clone_qubits)
    ops: list[GateOp] = [GateOp("H", (q,)) for q in lay.eve]
    ops += [GateOp("CNOT", (a, e)) for a, e in zip(lay.alice, lay.eve)]
    ops += [GateOp("CNOT", (c, a)) for c, a in zip(lay.ancilla, lay.alice)]
    ops += [GateOp("CNOT", (e, c)) for e, c in zip(lay.eve, lay.ancilla)]
    return Circuit(lay.num_qubits, tuple(ops))


def build_qid_1q(program: SoftwareState) -> Circuit:
    """Single-qubit QID hardware: four CNOTs on (Alice, Eve, ancilla)."""
    _check_program(1, program)
    return Circuit(
        3,
        (
            GateOp("CNOT", (0, 1)),
            GateOp("CNOT", (0, 2)),
            GateOp("CNOT", (1, 0)),
            GateOp("CNOT", (2, 0)),
        ),
    )


def build_qid_2q(program: SoftwareState) -> Circuit:
    """Two-qubit QID hardware: SUM blocks onto both halves of the software
    register, then an X-conjugated inverse-shift block and a final SUM back
    onto Alice."""
    _check_program(2, program)
    ops = (
        # SUM Alice -> Eve clone register (2, 3)
        GateOp("CNOT", (1, 3)),
        GateOp("CCNOT", (0, 2, 3)),
        GateOp("CNOT", (0, 2)),
        # SUM Alice -> ancilla register (4, 5)
        GateOp("CNOT", (1, 5)),
        GateOp("CCNOT", (0, 4, 5)),
        GateOp("CNOT", (0, 4)),
        # inverse shift of Alice controlled on (2, 3), conjugated by X
        GateOp("X", (0,)),
        GateOp("X", (1,)),
        GateOp("CNOT", (3, 1)),
        GateOp("CCNOT", (0, 2, 1)),
        GateOp("CNOT", (2, 0)),
        GateOp("X", (0,)),
        GateOp("X", (1,)),
        # SUM ancilla -> Alice
        GateOp("CNOT", (5, 1)),
        GateOp("CCNOT", (0, 4, 1)),
        GateOp("CNOT", (4, 0)),
    )
    return Circuit(6, ops)


def build_cloner(
    kind: ClonerKind, num_clone_qubits: int, program: SoftwareState
) -> Circuit:
    if kind == ClonerKind.NG:
        return build_ng(num_clone_qubits, program)
    if num_clone_qubits == 1:
        return build_qid_1q(program)
    if num_clone_qubits == 2:
        return build_qid_2q(program)
    raise ValueError("QID circuits are available for 1- and 2-qubit registers only")


@dataclass(frozen=True)
class FidelityReport:
    """Per-basis and per-state clone fidelities for both receivers."""

    f_ab: dict
    f_ae: dict
    per_state_ab: dict
    per_state_ae: dict

    @classmethod
    def from_per_state(cls, per_ab: dict, per_ae: dict) -> "FidelityReport":
        f_ab = {lbl: float(np.mean(v)) for lbl, v in per_ab.items()}
        f_ae = {lbl: float(np.mean(v)) for lbl, v in per_ae.items()}
        return cls(f_ab, f_ae, per_ab, per_ae)

    @property
    def basis_labels(self) -> tuple[str, ...]:
        return tuple(self.f_ab)

    @property
    def f_ab_avg(self) -> float:
        return float(np.mean(list(self.f_ab.values())))

    @property
    def f_ae_avg(self) -> float:
        return float(np.mean(list(self.f_ae.values())))


def _output_state(
    circuit: Circuit,
    layout: ClonerLayout,
    program: SoftwareState,
    input_amps: np.ndarray,
) -> StateVector:
    state = basis_state(layout.num_qubits, 0)
    state = inject_state(state, layout.software, program.amplitudes)
    state = inject_state(state, layout.alice, input_amps)
    return simcore.apply_circuit(state, circuit)


def clone_output_reduced(
    kind: ClonerKind,
    num_clone_qubits: int,
    program: SoftwareState,
    input_state: StateVector,
    channel: PauliChannel | None = None,
) -> tuple[DensityMatrix, DensityMatrix]:
    """Bob's and Eve's reduced output states for one input state."""
    lay = ClonerLayout(num_clone_qubits)
    circuit = build_cloner(kind, num_clone_qubits, program)
    if input_state.num_qubits != num_clone_qubits:
        raise ValueError("input state size does not match the cloner registers")
    if channel is not None and channel.num_qubits != num_clone_qubits:
        raise ValueError("channel size does not match the cloner registers")
    branches = (
        [(None, 1.0)]
        if channel is None
        else [(p.matrix(), w) for p, w in channel.branches()]
    )
    rho_b = np.zeros((2**num_clone_qubits,) * 2, dtype=complex)
    rho_e = np.zeros_like(rho_b)
    for err, weight in branches:
        amps = input_state.amplitudes if err is None else err @ input_state.amplitudes
        out = _output_state(circuit, lay, program, amps)
        rho_b += weight * reduced_density_matrix(out, lay.alice).matrix
        rho_e += weight * reduced_density_matrix(out, lay.eve).matrix
    return (
        DensityMatrix(num_clone_qubits, rho_b),
        DensityMatrix(num_clone_qubits, rho_e),
    )


def clone_fidelity_states(
    kind: ClonerKind,
    num_clone_qubits: int,
    program: SoftwareState,
    states,
    channel: PauliChannel | None = None,
) -> list[tuple[float, float]]:
    """(F_AB, F_AE) for each input state, mixing Kraus branches if noisy."""
    out = []
    for st in states:
        rho_b, rho_e = clone_output_reduced(
            kind, num_clone_qubits, program, st, channel
        )
        out.append((fidelity_pure(rho_b, st), fidelity_pure(rho_e, st)))
    return out


def clone_fidelities(
    kind: ClonerKind,
    num_clone_qubits: int,
    program: SoftwareState,
    channel: PauliChannel | None = None,
    bases=None,
) -> FidelityReport:
    """Per-basis clone fidelities over a set of mutually unbiased bases.

    ``bases`` may be a MubSet, a sequence of MubBasis, or None for the full
    set belonging to the register size.
    """
    if bases is None:
        bases = mubs_for(num_clone_qubits).bases
    elif isinstance(bases, MubSet):
        bases = bases.bases
    per_ab: dict[str, tuple[float, ...]] = {}
    per_ae: dict[str, tuple[float, ...]] = {}
    for basis in bases:
        if not isinstance(basis, MubBasis):
            raise TypeError(f"expected MubBasis, got {type(basis)!r}")
        vals = clone_fidelity_states(
            kind, num_clone_qubits, program, basis.states, channel
        )
        per_ab[basis.label] = tuple(v[0] for v in vals)
        per_ae[basis.label] = tuple(v[1] for v in vals)
    return FidelityReport.from_per_state(per_ab, per_ae)


def b92_per_state_fidelities(circuit: Circuit) -> dict:
    """Clone fidelities of a 2-qubit circuit for the inputs |0> and |+>.

    Qubit 0 carries Alice's state and becomes Bob's output; qubit 1 starts
    in |0> and becomes Eve's output.
    """
    if circuit.num_qubits != 2:
        raise ValueError("B92 cloning circuits act on exactly 2 qubits")
    s = 1 / math.sqrt(2)
    inputs = {"0": np.array([1.0, 0.0]), "+": np.array([s, s])}
    out = {}
    for label, amps in inputs.items():
        st = inject_state(basis_state(2, 0), (0,), amps)
        final = simcore.apply_circuit(st, circuit)
        ref = StateVector(1, amps)
        f_ab = fidelity_pure(reduced_density_matrix(final, (0,)), ref)
        f_ae = fidelity_pure(reduced_density_matrix(final, (1,)), ref)
        out[label] = (f_ab, f_ae)
    return out


def b92_fidelities(circuit: Circuit) -> tuple[float, float]:
    """Average (F_AB, F_AE) over the two B92 input states."""
    per = b92_per_state_fidelities(circuit)
    return (
        float(np.mean([v[0] for v in per.values()])),
        float(np.mean([v[1] for v in per.values()])),
    )


def bob_pauli_transfer_matrix(
    kind: ClonerKind, num_clone_qubits: int, program: SoftwareState
) -> np.ndarray:
    """Pauli transfer matrix of the channel Alice -> Bob induced by the cloner.

    R[i, j] = Tr[P_i L(P_j)] / 2^N over the (z|x)-ordered Pauli strings.  A
    Pauli channel shows up as a diagonal matrix.
    """
    lay = ClonerLayout(num_clone_qubits)
    circuit = build_cloner(kind, num_clone_qubits, program)
    dim = 2**num_clone_qubits
    base = inject_state(basis_state(lay.num_qubits, 0), lay.software, program.amplitudes)
    # s[k] reshapes the output for basis input k into (Bob, environment)
    s = np.empty((dim, dim, 2 ** (lay.num_qubits - num_clone_qubits)), dtype=complex)
    for k in range(dim):
        amps = np.zeros(dim)
        amps[k] = 1.0
        out = simcore.apply_circuit(inject_state(base, lay.alice, amps), circuit)
        t = out.amplitudes.reshape((2,) * lay.num_qubits)
        perm = list(lay.alice) + [q for q in range(lay.num_qubits) if q not in lay.alice]
        s[k] = np.transpose(t, perm).reshape(dim, -1)
    # cross = Tr_env |psi_k><psi_l| as a (k, l)-indexed stack of dim x dim blocks
    cross = np.einsum("kae,lbe->klab", s, s.conj())
    paulis = [index_to_pauli(j, num_clone_qubits).matrix() for j in range(4**num_clone_qubits)]
    r = np.empty((len(paulis), len(paulis)), dtype=complex)
    for j, pj in enumerate(paulis):
        lam = np.einsum("kl,klab->ab", pj, cross)
        for i, pi in enumerate(paulis):
            r[i, j] = np.trace(pi @ lam) / dim
    return r
