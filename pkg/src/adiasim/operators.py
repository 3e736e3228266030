"""Pauli operators and two-qubit embeddings.

Sign convention used throughout the package: the computational basis is
ordered ``|00>, |01>, |10>, |11>`` and the Z operator is

    Z = [[-1, 0], [0, +1]]

so that ``Z|0> = -|0>`` and ``Z|1> = +|1>``.  With this choice a positive
longitudinal field ``(z/2) Z`` makes ``|1>`` the excited state, and the
ground state of a two-qubit longitudinal Hamiltonian is ``|00>``.
X and Y keep their standard matrix forms, hence

    sigma_minus = |0><1| = [[0, 1], [0, 0]]

lowers the qubit toward ``|0>``.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "I2",
    "X",
    "Y",
    "Z",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "PAULI_1Q",
    "PAULI_LABELS_2Q",
    "pauli_1q",
    "pauli_2q",
    "embed_1q",
    "commutator",
    "dagger",
]

I2 = np.eye(2, dtype=complex)
X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)

# Lowering operator toward |0>: sigma_minus |1> = |0>.
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.conj().T

PAULI_1Q = {"I": I2, "X": X, "Y": Y, "Z": Z}

# The eight correlators recorded by the tomography layer, in file order.
PAULI_LABELS_2Q = ("XI", "IX", "YI", "IY", "ZI", "IZ", "XX", "YY")


def pauli_1q(label: str) -> np.ndarray:
    """Return the single-qubit Pauli matrix for ``label`` in {I, X, Y, Z}."""
    try:
        return PAULI_1Q[label].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli label {label!r}") from None


def pauli_2q(label: str) -> np.ndarray:
    """Return the two-qubit Pauli product for a two-letter ``label``.

    The first letter acts on qubit 1 (left tensor factor), the second on
    qubit 2, e.g. ``pauli_2q("ZI") = kron(Z, I)``.
    """
    if len(label) != 2:
        raise ValueError(f"two-qubit label must have two letters, got {label!r}")
    return np.kron(pauli_1q(label[0]), pauli_1q(label[1]))


def embed_1q(op: np.ndarray, qubit: int) -> np.ndarray:
    """Embed a single-qubit operator into the two-qubit space.

    ``qubit`` is 1-based: 1 means the left tensor factor, 2 the right.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError(f"expected a 2x2 operator, got shape {op.shape}")
    if qubit == 1:
        return np.kron(op, I2)
    if qubit == 2:
        return np.kron(I2, op)
    raise ValueError(f"qubit index must be 1 or 2, got {qubit}")


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``a @ b - b @ a``."""
    return a @ b - b @ a


def dagger(a: np.ndarray) -> np.ndarray:
    """Return the conjugate transpose of ``a``."""
    return np.asarray(a).conj().T
