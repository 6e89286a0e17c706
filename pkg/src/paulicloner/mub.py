"""Mutually unbiased bases for one and two qubits, and Pauli-group structure.

The five two-qubit bases are stored in a fixed state order; preparation
circuits map the computational basis states onto them index-for-index (up to
a global phase per state).  Pauli strings are written with letter i acting on
qubit i, so "XZ" means X on qubit 0 and Z on qubit 1.

The (z|x) integer encoding of a Pauli string packs the Z mask into the high
N bits and the X mask into the low N bits (qubit 0 most significant within
each mask).  The same encoding indexes the cloner program amplitudes, which
is what ties the commuting-class structure to the fidelity formulas.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .simcore import Circuit, GateOp, StateVector

PAULI_LETTERS = "IXYZ"
_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliString:
    """An N-qubit Pauli operator as a string over {I, X, Y, Z}."""

    letters: str

    def __post_init__(self) -> None:
        if len(self.letters) < 1 or any(c not in PAULI_LETTERS for c in self.letters):
            raise ValueError(f"invalid Pauli string {self.letters!r}")

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.letters

    @property
    def is_identity(self) -> bool:
        return set(self.letters) == {"I"}

    def matrix(self) -> np.ndarray:
        m = np.array([[1.0 + 0j]])
        for c in self.letters:
            m = np.kron(m, _PAULI_MATS[c])
        return m

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls("I" * num_qubits)


def pauli_to_index(p: PauliString) -> int:
    """(z|x) encoding: high bits Z mask, low bits X mask (Y sets both)."""
    z = x = 0
    n = len(p)
    for i, c in enumerate(p.letters):
        bit = 1 << (n - 1 - i)
        if c in "ZY":
            z |= bit
        if c in "XY":
            x |= bit
    return (z << n) | x


def index_to_pauli(index: int, num_qubits: int) -> PauliString:
    if not 0 <= index < 4**num_qubits:
        raise ValueError(f"index {index} out of range for {num_qubits} qubits")
    z, x = index >> num_qubits, index & ((1 << num_qubits) - 1)
    letters = []
    for i in range(num_qubits):
        bit = 1 << (num_qubits - 1 - i)
        letters.append("IXZY"[(bool(x & bit)) + 2 * (bool(z & bit))])
    return PauliString("".join(letters))


def _symplectic_commutes(u: int, v: int, num_qubits: int) -> bool:
    mask = (1 << num_qubits) - 1
    zu, xu = u >> num_qubits, u & mask
    zv, xv = v >> num_qubits, v & mask
    return (bin(zu & xv).count("1") + bin(xu & zv).count("1")) % 2 == 0


@dataclass(frozen=True)
class MubBasis:
    """One orthonormal basis: a label and 2^N states in a fixed order."""

    label: str
    states: tuple[StateVector, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        dim = len(self.states)
        g = np.array([s.amplitudes for s in self.states])
        if np.max(np.abs(g @ g.conj().T - np.eye(dim))) > 1e-12:
            raise ValueError(f"basis {self.label} is not orthonormal")

    @property
    def num_qubits(self) -> int:
        return self.states[0].num_qubits


@dataclass(frozen=True)
class MubSet:
    """A collection of pairwise mutually unbiased bases."""

    num_qubits: int
    bases: tuple[MubBasis, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bases", tuple(self.bases))
        target = 2.0**-self.num_qubits
        for i, a in enumerate(self.bases):
            for b in self.bases[i + 1 :]:
                for sa in a.states:
                    for sb in b.states:
                        ov = abs(np.vdot(sa.amplitudes, sb.amplitudes)) ** 2
                        if abs(ov - target) > 1e-12:
                            raise ValueError(
                                f"bases {a.label}/{b.label} are not unbiased"
                            )

    def __getitem__(self, label: str) -> MubBasis:
        for b in self.bases:
            if b.label == label:
                return b
        raise KeyError(label)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.bases)


def _sv(vec) -> StateVector:
    v = np.asarray(vec, dtype=complex)
    n = int(round(np.log2(v.size)))
    return StateVector(n, v)


@lru_cache(maxsize=None)
def single_qubit_mubs() -> MubSet:
    """The Z, X and Y eigenbases, in that order."""
    s = 1 / np.sqrt(2)
    return MubSet(
        1,
        (
            MubBasis("Z", (_sv([1, 0]), _sv([0, 1]))),
            MubBasis("X", (_sv([s, s]), _sv([s, -s]))),
            MubBasis("Y", (_sv([s, 1j * s]), _sv([s, -1j * s]))),
        ),
    )


# The five two-qubit bases, states listed column by column.
_M_VECTORS = {
    "M0": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)],
    "M1": [(1, 1, 1, 1), (1, -1, 1, -1), (1, 1, -1, -1), (1, -1, -1, 1)],
    "M2": [(1, -1, 1j, 1j), (1, 1, 1j, -1j), (1, 1, -1j, 1j), (1, -1, -1j, -1j)],
    "M3": [(1, 1j, 1j, -1), (1, -1j, 1j, 1), (1, 1j, -1j, 1), (1, -1j, -1j, -1)],
    "M4": [(1, -1j, -1, -1j), (1, 1j, 1, -1j), (1, -1j, 1, 1j), (1, 1j, -1, 1j)],
}


@lru_cache(maxsize=None)
def two_qubit_mubs() -> MubSet:
    """The five two-qubit bases M0 .. M4."""
    bases = []
    for label, cols in _M_VECTORS.items():
        scale = 1.0 if label == "M0" else 0.5
        bases.append(MubBasis(label, tuple(_sv(scale * np.array(c)) for c in cols)))
    return MubSet(2, tuple(bases))


def mubs_for(num_qubits: int) -> MubSet:
    if num_qubits == 1:
        return single_qubit_mubs()
    if num_qubits == 2:
        return two_qubit_mubs()
    raise ValueError(f"no explicit MUB construction for {num_qubits} qubits")


def mub_prep_circuit(basis_index: int) -> Circuit:
    """Two-qubit circuit mapping |k> onto state k of basis M_{basis_index}."""
    if not 0 <= basis_index <= 4:
        raise ValueError(f"basis index {basis_index} out of range 0..4")
    hh = [GateOp("H", (0,)), GateOp("H", (1,))]
    ss = [GateOp("S", (0,)), GateOp("S", (1,))]
    zz = [GateOp("Z", (0,)), GateOp("Z", (1,))]
    ops = {
        0: [],
        1: hh,
        2: hh + ss + [GateOp("CNOT", (1, 0))],
        3: hh + ss,
        4: hh + ss + zz + [GateOp("CNOT", (0, 1))],
    }[basis_index]
    return Circuit(2, tuple(ops))


@dataclass(frozen=True)
class PauliAction:
    """How a Pauli string acts on one basis: fixes every state ray, or permutes.

    ``permutation[k]`` is the index of the state that state k maps onto, and
    ``phases[k]`` the unit factor picked up: P|b_k> = phases[k] |b_perm[k]>.
    For the invariant case the permutation is the identity.
    """

    kind: str  # "invariant" | "permutation"
    permutation: tuple[int, ...]
    phases: tuple[complex, ...]

    @property
    def is_invariant(self) -> bool:
        return self.kind == "invariant"


def pauli_action(p: PauliString, basis: MubBasis) -> PauliAction:
    """Classify the action of a Pauli string on the states of a basis."""
    if len(p) != basis.num_qubits:
        raise ValueError(
            f"Pauli on {len(p)} qubits vs basis on {basis.num_qubits} qubits"
        )
    u = p.matrix()
    g = np.array([s.amplitudes for s in basis.states])  # rows are states
    ov = g.conj() @ (u @ g.T)  # ov[j, k] = <b_j| P |b_k>
    perm, phases = [], []
    for k in range(g.shape[0]):
        col = ov[:, k]
        j = int(np.argmax(np.abs(col)))
        if abs(abs(col[j]) - 1.0) > 1e-10 or np.sum(np.abs(col) > 1e-10) != 1:
            raise ValueError(
                f"{p} does not map state {k} of basis {basis.label} onto a basis ray"
            )
        perm.append(j)
        phases.append(complex(col[j]))
    kind = "invariant" if perm == list(range(len(perm))) else "permutation"
    return PauliAction(kind, tuple(perm), tuple(phases))


# Error triplets in table row order; each triplet together with the identity
# forms a Klein four-group and stabilizes exactly one of the five bases.
TWO_QUBIT_ERROR_ROWS = (
    (PauliString("XX"), PauliString("IX"), PauliString("XI")),
    (PauliString("XZ"), PauliString("YX"), PauliString("ZY")),
    (PauliString("ZX"), PauliString("XY"), PauliString("YZ")),
    (PauliString("ZZ"), PauliString("IZ"), PauliString("ZI")),
    (PauliString("YY"), PauliString("IY"), PauliString("YI")),
)

SINGLE_QUBIT_ERROR_ROWS = (
    (PauliString("X"),),
    (PauliString("Y"),),
    (PauliString("Z"),),
)

# Column order of the one-qubit action table (differs from the Z, X, Y
# construction order of single_qubit_mubs).
SINGLE_QUBIT_TABLE_BASES = ("X", "Y", "Z")


def action_table(num_qubits: int) -> np.ndarray:
    """0/1 grid over (error rows x bases): 0 = basis invariant, 1 = permuted.

    Rows follow SINGLE_QUBIT_ERROR_ROWS / TWO_QUBIT_ERROR_ROWS; columns are
    X, Y, Z for one qubit and M0 .. M4 for two.
    """
    if num_qubits == 1:
        rows, bases = SINGLE_QUBIT_ERROR_ROWS, [
            single_qubit_mubs()[lbl] for lbl in SINGLE_QUBIT_TABLE_BASES
        ]
    elif num_qubits == 2:
        rows, bases = TWO_QUBIT_ERROR_ROWS, list(two_qubit_mubs().bases)
    else:
        raise ValueError("action table is defined for 1 or 2 qubits")
    table = np.zeros((len(rows), len(bases)), dtype=int)
    for r, triplet in enumerate(rows):
        for c, basis in enumerate(bases):
            bits = {int(not pauli_action(p, basis).is_invariant) for p in triplet}
            if len(bits) != 1:
                raise RuntimeError(
                    f"errors {triplet} disagree on basis {basis.label}"
                )
            table[r, c] = bits.pop()
    return table


def commuting_classes(num_qubits: int) -> list[tuple[PauliString, ...]]:
    """Partition the 4^N - 1 nonidentity Pauli strings into 2^N + 1 classes.

    Within a class all elements commute, and the class plus the identity is
    closed under multiplication (a copy of Z_2^N).  For one and two qubits the
    published row order is kept; for three qubits a deterministic backtracking
    search over the symplectic encoding finds a partition.
    """
    if num_qubits == 1:
        return [tuple(row) for row in SINGLE_QUBIT_ERROR_ROWS]
    if num_qubits == 2:
        return [tuple(row) for row in TWO_QUBIT_ERROR_ROWS]
    if num_qubits == 3:
        classes = _spread_search(3)
        return [
            tuple(index_to_pauli(v, 3) for v in cls) for cls in classes
        ]
    raise ValueError("commuting classes supported for at most 3 qubits")


def _subgroup_span(gens: list[int]) -> set[int]:
    span = {0}
    for g in gens:
        span |= {s ^ g for s in span}
    span.discard(0)
    return span


def _spread_search(num_qubits: int) -> list[tuple[int, ...]]:
    """Exhaustive backtracking for a partition into maximal isotropic classes.

    Classes through the smallest unused element are tried in lexicographic
    generator order, which makes the result deterministic.
    """
    n = num_qubits

    def classes_through(seed: int, available: set[int]):
        def walk(gens: list[int], members: set[int]):
            if len(gens) == n:
                yield members
                return
            for v in sorted(available):
                if v > gens[-1] and v not in members and all(
                    _symplectic_commutes(v, g, n) for g in gens
                ):
                    grown = _subgroup_span(gens + [v])
                    if grown <= available:
                        yield from walk(gens + [v], grown)

        yield from walk([seed], {seed})

    def partition(available: set[int]):
        if not available:
            return []
        for cls in classes_through(min(available), available):
            rest = partition(available - cls)
            if rest is not None:
                return [tuple(sorted(cls))] + rest
        return None

    classes = partition(set(range(1, 4**n)))
    if classes is None:
        raise RuntimeError("no commuting-class partition found")
    return classes
