"""Exact density-matrix oracle for small Werner-pair networks.

Dense complex linear algebra on up to six qubits (64x64), used as ground
truth for the analytic outcome distributions, for multiplicative Werner
composition under entanglement swapping, and for the path-state generation
procedures.  Pure functions over immutable states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

ATOL_EQ = 1e-12
ATOL_PSD = 1e-10
NEGLIGIBLE_PROB = 1e-14
MAX_DIM = 64

BELL_LABELS = ("phi+", "phi-", "psi+", "psi-")
ZZ_LABELS = ("00", "01", "10", "11")

_SQRT_HALF = 1.0 / np.sqrt(2.0)
_BELL_VECTORS = {
    "phi+": np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) * _SQRT_HALF,
    "phi-": np.array([1.0, 0.0, 0.0, -1.0], dtype=complex) * _SQRT_HALF,
    "psi+": np.array([0.0, 1.0, 1.0, 0.0], dtype=complex) * _SQRT_HALF,
    "psi-": np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) * _SQRT_HALF,
}

_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# Outcome-dependent Pauli fixup applied to one retained qubit so every
# measurement branch collapses to the same swapped state.
_CORRECTIONS = {
    "phi+": np.eye(2, dtype=complex),
    "phi-": _PAULI_Z,
    "psi+": _PAULI_X,
    "psi-": _PAULI_X @ _PAULI_Z,
}


@dataclass(frozen=True)
class DensityMatrix:
    """Validated density matrix over labeled qubits.

    Invariants enforced at construction: Hermitian and unit trace within
    1e-12, smallest eigenvalue at least -1e-10, dimension 2**len(qubits).
    """

    matrix: np.ndarray
    qubits: tuple

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("matrix must be square")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("qubit labels must be unique")
        if m.shape[0] != 2 ** len(self.qubits):
            raise ValueError(
                f"dimension {m.shape[0]} does not match {len(self.qubits)} qubit labels"
            )
        if m.shape[0] > MAX_DIM:
            raise ValueError(f"dimension {m.shape[0]} exceeds the cap {MAX_DIM}")
        if np.max(np.abs(m - m.conj().T)) > ATOL_EQ:
            raise ValueError("matrix is not Hermitian within tolerance")
        if abs(np.trace(m).real - 1.0) > ATOL_EQ or abs(np.trace(m).imag) > ATOL_EQ:
            raise ValueError("trace must equal 1 within tolerance")
        if np.linalg.eigvalsh(m)[0] < -ATOL_PSD:
            raise ValueError("matrix is not positive semidefinite within tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "qubits", tuple(self.qubits))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class BellOutcome:
    """One Bell-measurement branch: label, probability, post-measurement state.

    ``post_state`` is None and ``negligible`` is True when the branch
    probability falls below 1e-14 and no normalized state exists.
    """

    label: str
    probability: float
    post_state: DensityMatrix | None
    negligible: bool = False


def werner_density(w: float, labels: tuple = ("q0", "q1")) -> DensityMatrix:
    """Two-qubit Werner state: w times the phi+ projector plus (1-w)/4 times I."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"w={w} outside [0, 1]")
    phi = _BELL_VECTORS["phi+"]
    rho = w * np.outer(phi, phi.conj()) + (1.0 - w) * np.eye(4, dtype=complex) / 4.0
    return DensityMatrix(rho, tuple(labels))


def werner_fidelity(w: float) -> float:
    """Overlap of the Werner state with the phi+ Bell state: (1 + 3w) / 4."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"w={w} outside [0, 1]")
    return (1.0 + 3.0 * w) / 4.0


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product with concatenated qubit labels."""
    if a.dimension * b.dimension > MAX_DIM:
        raise ValueError(
            f"combined dimension {a.dimension * b.dimension} exceeds the cap {MAX_DIM}"
        )
    if set(a.qubits) & set(b.qubits):
        raise ValueError("qubit labels must be disjoint")
    return DensityMatrix(np.kron(a.matrix, b.matrix), a.qubits + b.qubits)


def relabel(state: DensityMatrix, labels: Sequence[str]) -> DensityMatrix:
    """Same matrix under new qubit labels."""
    if len(labels) != len(state.qubits):
        raise ValueError("label count must match the qubit count")
    return DensityMatrix(state.matrix, tuple(labels))


def _lift(op: np.ndarray, positions: Sequence[int], n: int) -> np.ndarray:
    """Embed an operator on the given qubit positions into the n-qubit space."""
    k = len(positions)
    rest = [q for q in range(n) if q not in positions]
    t = np.tensordot(
        op.reshape((2,) * (2 * k)),
        np.eye(2 ** (n - k), dtype=complex).reshape((2,) * (2 * (n - k))),
        axes=0,
    )
    cur = list(positions) + rest
    row_axis = {}
    col_axis = {}
    for i, q in enumerate(cur):
        row_axis[q] = i if i < k else 2 * k + (i - k)
        col_axis[q] = k + i if i < k else k + n + (i - k)
    perm = [row_axis[q] for q in range(n)] + [col_axis[q] for q in range(n)]
    return t.transpose(perm).reshape(2**n, 2**n)


def _partial_trace(mat: np.ndarray, keep: Sequence[int], n: int) -> np.ndarray:
    t = mat.reshape((2,) * (2 * n))
    cur = n
    for q in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=q, axis2=q + cur)
        cur -= 1
    return t.reshape(2**cur, 2**cur)


def bsm(
    state: DensityMatrix,
    qubit_pair: tuple,
    correct_on: str | None = None,
) -> list:
    """Bell-state measurement of two labeled qubits.

    Returns the four BellOutcome branches in the fixed label order.  When
    ``correct_on`` names a retained qubit, the outcome-dependent Pauli fixup
    is applied there, which makes all non-negligible branches coincide for
    entanglement swapping.  Branches with probability below 1e-14 carry no
    post-state and are flagged negligible.
    """
    labels = state.qubits
    for q in qubit_pair:
        if q not in labels:
            raise ValueError(f"unknown qubit label {q!r}")
    if len(set(qubit_pair)) != 2:
        raise ValueError("measurement pair must be two distinct qubits")
    n = len(labels)
    pos = (labels.index(qubit_pair[0]), labels.index(qubit_pair[1]))
    rest_labels = tuple(l for l in labels if l not in qubit_pair)
    keep = [i for i in range(n) if i not in pos]
    if correct_on is not None:
        if correct_on not in rest_labels:
            raise ValueError(f"correction target {correct_on!r} is not a retained qubit")
        fix_pos = rest_labels.index(correct_on)

    outcomes = []
    for label in BELL_LABELS:
        vec = _BELL_VECTORS[label]
        proj = _lift(np.outer(vec, vec.conj()), pos, n)
        selected = proj @ state.matrix @ proj
        prob = float(np.trace(selected).real)
        if prob < NEGLIGIBLE_PROB:
            outcomes.append(BellOutcome(label, max(prob, 0.0), None, negligible=True))
            continue
        reduced = _partial_trace(selected, keep, n)
        if correct_on is not None:
            fix = _lift(_CORRECTIONS[label], (fix_pos,), len(rest_labels))
            reduced = fix @ reduced @ fix.conj().T
        post = DensityMatrix(reduced / prob, rest_labels)
        outcomes.append(BellOutcome(label, prob, post))
    return outcomes


def _merge_branches(outcomes: Sequence[BellOutcome]) -> DensityMatrix:
    """Probability-weighted mixture of the non-negligible corrected branches."""
    live = [o for o in outcomes if not o.negligible]
    if not live:
        raise ValueError("all measurement branches are negligible")
    total = sum(o.probability for o in live)
    mixed = sum(o.probability * o.post_state.matrix for o in live) / total
    return DensityMatrix(mixed, live[0].post_state.qubits)


def linear_generation(
    params: Sequence[float], labels: tuple = ("A", "B")
) -> DensityMatrix:
    """End-to-end path state from one Werner pair per link, swapped at relays.

    Each intermediate node measures its two qubits in the Bell basis with the
    Pauli fixup applied downstream, so the chain collapses to a single Werner
    pair whose parameter is the product of the link parameters.
    """
    if not 1 <= len(params) <= 3:
        raise ValueError("path length must be between 1 and 3 links")
    left, right = labels
    last = len(params) - 1
    state = werner_density(params[0], (left, right if last == 0 else "_r0"))
    for k, w in enumerate(params[1:], start=1):
        pair = werner_density(w, (f"_l{k}", right if k == last else f"_r{k}"))
        joint = tensor(state, pair)
        branches = bsm(joint, (f"_r{k - 1}", f"_l{k}"), correct_on=pair.qubits[1])
        state = _merge_branches(branches)
    return state


def cyclic_generation(
    params: Sequence[float], labels: tuple = ("A", "B")
) -> DensityMatrix:
    """Two linear path copies fused by a corrected Bell measurement at the far end.

    The surviving pair sits at the near endpoint and carries the squared path
    product as its Werner parameter.
    """
    first = linear_generation(params, ("_cyc_a1", "_cyc_b1"))
    second = linear_generation(params, ("_cyc_a2", "_cyc_b2"))
    joint = tensor(first, second)
    branches = bsm(joint, ("_cyc_b1", "_cyc_b2"), correct_on="_cyc_a2")
    return relabel(_merge_branches(branches), labels)


def zz_probabilities(state: DensityMatrix) -> dict:
    """Computational-basis outcome probabilities of a two-qubit state."""
    if state.dimension != 4:
        raise ValueError("expected a two-qubit state")
    diag = np.clip(np.diag(state.matrix).real, 0.0, None)
    return dict(zip(ZZ_LABELS, (float(p) for p in diag)))


def bsm_probabilities(state: DensityMatrix) -> dict:
    """Bell-measurement outcome probabilities of a two-qubit state."""
    if state.dimension != 4:
        raise ValueError("expected a two-qubit state")
    return {o.label: o.probability for o in bsm(state, state.qubits)}


def jbm_oracle_probabilities(params: Sequence[float]) -> dict:
    """Joint-Bell-measurement statistics from the exact cyclic construction."""
    return bsm_probabilities(cyclic_generation(params))


def pem_oracle_probabilities(params: Sequence[float]) -> dict:
    """Pair-assisted measurement statistics from the exact teleport construction.

    A noiseless Bell pair is appended at the path ends, the far endpoint
    teleports its half of the path state through it, and the near endpoint
    measures its two qubits jointly.
    """
    path_state = linear_generation(params, ("_pem_a1", "_pem_b1"))
    ideal = werner_density(1.0, ("_pem_a2", "_pem_b2"))
    joint = tensor(path_state, ideal)
    branches = bsm(joint, ("_pem_b1", "_pem_b2"), correct_on="_pem_a2")
    merged = _merge_branches(branches)
    return bsm_probabilities(merged)


def lzm_oracle_probabilities(params: Sequence[float]) -> dict:
    """Correlated Z-basis statistics from the exact path construction."""
    return zz_probabilities(linear_generation(params))
