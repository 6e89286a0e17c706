"""Dense statevector and density-matrix simulation for small qubit registers.

Bit-order convention used throughout the package: qubit 0 is the most
significant bit of the state index, so for an n-qubit register the
computational basis state |q0 q1 ... q_{n-1}> sits at index
q0 * 2^(n-1) + q1 * 2^(n-2) + ... + q_{n-1}.  Equivalently, reshaping an
amplitude vector to shape (2,)*n puts qubit q on axis q.  Operators written
as tensor products A (x) B place A on qubit 0.

Everything here is a pure function of its inputs; the wrapped numpy arrays
are marked read-only so values can be shared freely across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Single validation knob. The individual construction checks below use fixed
# multiples of it (norm checks at 1x, Hermiticity/trace at 100x, positivity
# and injection at 1000x).
VALIDATION_EPS = 1e-12

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_CCNOT = np.eye(8, dtype=complex)
_CCNOT[6:, 6:] = _X

SINGLE_QUBIT_GATES = ("H", "X", "Z", "S", "RX", "RY", "RZ")
ROTATION_GATES = ("RX", "RY", "RZ", "CRY")
GATE_NAMES = SINGLE_QUBIT_GATES + ("CNOT", "CCNOT", "CRY")


def _rx(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(angle: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex
    )


@dataclass(frozen=True)
class GateOp:
    """A single gate: name, acted-on qubits (controls first), optional angle.

    For CNOT the qubits are (control, target), for CCNOT (control, control,
    target).  CRY is a singly controlled RY whose control fires on
    ``control_value`` (0 or 1).
    """

    name: str
    qubits: tuple[int, ...]
    angle: float | None = None
    control_value: int = 1

    def __post_init__(self) -> None:
        if self.name not in GATE_NAMES:
            raise ValueError(f"unknown gate {self.name!r}")
        expected = {"CNOT": 2, "CCNOT": 3, "CRY": 2}.get(self.name, 1)
        if len(self.qubits) != expected:
            raise ValueError(f"{self.name} takes {expected} qubits, got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit indices in {self.qubits}")
        if self.name in ROTATION_GATES and self.angle is None:
            raise ValueError(f"{self.name} requires an angle")
        if self.control_value not in (0, 1):
            raise ValueError("control_value must be 0 or 1")

    def matrix(self) -> np.ndarray:
        if self.name == "H":
            return _H
        if self.name == "X":
            return _X
        if self.name == "Z":
            return _Z
        if self.name == "S":
            return _S
        if self.name == "RX":
            return _rx(self.angle)
        if self.name == "RY":
            return _ry(self.angle)
        if self.name == "RZ":
            return _rz(self.angle)
        if self.name == "CNOT":
            return _CNOT
        if self.name == "CCNOT":
            return _CCNOT
        # CRY: block-diagonal in the control qubit
        m = np.eye(4, dtype=complex)
        block = slice(2, 4) if self.control_value == 1 else slice(0, 2)
        m[block, block] = _ry(self.angle)
        return m

    def inverse(self) -> tuple["GateOp", ...]:
        """Inverse as a sequence of ops from the same gate set (S^-1 = S^3)."""
        if self.name in ("H", "X", "Z", "CNOT", "CCNOT"):
            return (self,)
        if self.name == "S":
            return (self, self, self)
        return (
            GateOp(self.name, self.qubits, -self.angle, self.control_value),
        )


@dataclass(frozen=True)
class Circuit:
    """An ordered list of gates on a fixed-size register."""

    num_qubits: int
    ops: tuple[GateOp, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if any(q < 0 or q >= self.num_qubits for q in op.qubits):
                raise ValueError(f"{op} outside register of {self.num_qubits} qubits")

    def inverse(self) -> "Circuit":
        inv: list[GateOp] = []
        for op in reversed(self.ops):
            inv.extend(op.inverse())
        return Circuit(self.num_qubits, tuple(inv))


@dataclass(frozen=True)
class StateVector:
    """Pure state of ``num_qubits`` qubits; amplitude vector of length 2^n."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if amps.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got {amps.shape}"
            )
        norm_sq = float(np.real(amps.conj() @ amps))
        if abs(norm_sq - 1.0) > VALIDATION_EPS:
            raise ValueError(
                f"state not normalized: |norm^2 - 1| = {abs(norm_sq - 1):.3e}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(
            self.num_qubits, np.outer(self.amplitudes, self.amplitudes.conj())
        )


@dataclass(frozen=True)
class DensityMatrix:
    """Mixed state: Hermitian, unit-trace, positive-semidefinite matrix."""

    num_qubits: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=complex)
        dim = 2**self.num_qubits
        if m.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 100 * VALIDATION_EPS:
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 100 * VALIDATION_EPS:
            raise ValueError(f"trace is {np.trace(m).real}, expected 1")
        if np.min(np.linalg.eigvalsh(m)) < -1000 * VALIDATION_EPS:
            raise ValueError("matrix has a negative eigenvalue")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def basis_state(num_qubits: int, index: int) -> StateVector:
    """Computational basis state |index> of an n-qubit register."""
    dim = 2**num_qubits
    if not 0 <= index < dim:
        raise ValueError(f"index {index} out of range for {num_qubits} qubits")
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def apply_ops(amplitudes: np.ndarray, num_qubits: int, ops) -> np.ndarray:
    """Apply gates to a bare amplitude vector (no validation; hot path)."""
    psi = amplitudes
    for op in ops:
        u = op.matrix()
        k = len(op.qubits)
        perm = list(op.qubits) + [q for q in range(num_qubits) if q not in op.qubits]
        t = np.transpose(psi.reshape((2,) * num_qubits), perm)
        shape = t.shape
        t = (u @ t.reshape(2**k, -1)).reshape(shape)
        psi = np.transpose(t, np.argsort(perm)).reshape(-1)
    return psi


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Evolve a pure state through a circuit (unitary, norm preserving)."""
    if state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits, circuit {circuit.num_qubits}"
        )
    out = apply_ops(state.amplitudes, state.num_qubits, circuit.ops)
    return StateVector(state.num_qubits, out)


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out all qubits not in ``keep``; kept qubits stay in ascending order."""
    keep = sorted(set(keep))
    n = rho.num_qubits
    if not keep:
        raise ValueError("keep set must be nonempty")
    if any(q < 0 or q >= n for q in keep):
        raise ValueError(f"keep indices {keep} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    if not traced:
        return rho
    t = rho.matrix.reshape((2,) * (2 * n))
    # row axes are 0..n-1, column axes n..2n-1
    perm = keep + traced + [n + q for q in keep] + [n + q for q in traced]
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    t = np.transpose(t, perm).reshape(dk, dt, dk, dt)
    return DensityMatrix(len(keep), np.einsum("abcb->ac", t))


def reduced_density_matrix(state: StateVector, keep) -> DensityMatrix:
    """Partial trace of a pure state, computed without forming the full matrix."""
    keep = sorted(set(keep))
    n = state.num_qubits
    if not keep:
        raise ValueError("keep set must be nonempty")
    traced = [q for q in range(n) if q not in keep]
    perm = keep + traced
    m = np.transpose(state.amplitudes.reshape((2,) * n), perm).reshape(
        2 ** len(keep), -1
    )
    return DensityMatrix(len(keep), m @ m.conj().T)


def fidelity_pure(rho: DensityMatrix, psi: StateVector) -> float:
    """<psi| rho |psi> for a mixed state against a pure reference."""
    if rho.num_qubits != psi.num_qubits:
        raise ValueError("dimension mismatch between rho and psi")
    val = psi.amplitudes.conj() @ rho.matrix @ psi.amplitudes
    return float(val.real)


def inject_state(state: StateVector, register, amplitudes) -> StateVector:
    """Replace the |0...0> contents of ``register`` with the given amplitudes.

    The register qubits must currently be in |0...0> and unentangled with the
    rest; the remaining qubits are untouched.  ``register`` lists qubits in
    order of decreasing significance for the injected amplitude index.
    """
    register = list(register)
    n = state.num_qubits
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.shape != (2 ** len(register),):
        raise ValueError(f"expected {2 ** len(register)} amplitudes for register")
    if abs(np.linalg.norm(amps) - 1.0) > 1000 * VALIDATION_EPS:
        raise ValueError("injected amplitudes are not normalized")
    t = state.amplitudes.reshape((2,) * n)
    rest = [q for q in range(n) if q not in register]
    base = np.transpose(t, register + rest).reshape(2 ** len(register), -1)
    if np.linalg.norm(base[1:]) > 1000 * VALIDATION_EPS:
        raise ValueError("register is not in |0...0>")
    out = np.multiply.outer(amps, base[0]).reshape(
        (2,) * len(register) + (2,) * len(rest)
    )
    out = np.transpose(out, np.argsort(register + rest)).reshape(-1)
    return StateVector(n, out)
