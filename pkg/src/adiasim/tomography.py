"""Pauli correlators, shot sampling, energy reconstruction, frame rotation.

A ``Tomogram`` holds the eight recorded correlators
{XI, IX, YI, IY, ZI, IZ, XX, YY} at one sample time, plus the optional
cross terms XY and YX which are needed to rotate two-qubit correlators
between drive frames.  Shot count 0 means exact expectation values.

The energy estimator deliberately uses only the six sweep terms

    E/h = (1-s)(z1<ZI> + z2<IZ>)/2 + s(x1<XI> + x2<IX>)/2
        + j(t)(<XX> + <YY>)/4,        s = t/t_ad,

excluding the static ZZ term: the estimate reconstructs the controlled
part of the Hamiltonian from measured correlators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import BadIndex
from .operators import PAULI_LABELS_2Q, pauli_2q
from .schedule import ProtocolSchedule

__all__ = [
    "MissingTerm",
    "Tomogram",
    "EnergyEstimate",
    "expectation",
    "sample_expectation",
    "measure_tomogram",
    "energy_from_correlators",
    "rotate_frame",
    "CROSS_LABELS",
]

CROSS_LABELS = ("XY", "YX")

_OPS = {label: pauli_2q(label) for label in PAULI_LABELS_2Q + CROSS_LABELS}


class MissingTerm(KeyError):
    """Raised when a tomogram lacks a correlator required by an operation."""


@dataclass(frozen=True)
class Tomogram:
    """Correlator snapshot at one time.

    values must contain all eight standard labels; XY/YX are optional and
    enable exact frame rotation of the two-qubit transverse correlators.
    """

    time: float
    values: dict[str, float]
    shots: int = 0

    def __post_init__(self) -> None:
        missing = [lab for lab in PAULI_LABELS_2Q if lab not in self.values]
        if missing:
            raise MissingTerm(f"tomogram lacks terms {missing}")
        eps = 1e-9 if self.shots == 0 else 3.0 / np.sqrt(self.shots)
        for lab, val in self.values.items():
            if abs(val) > 1.0 + eps:
                raise ValueError(f"correlator {lab} = {val} outside [-1, 1] range")

    def __getitem__(self, label: str) -> float:
        try:
            return self.values[label]
        except KeyError:
            raise MissingTerm(f"tomogram lacks term {label!r}") from None

    def get(self, label: str, default: float | None = None) -> float | None:
        return self.values.get(label, default)


def expectation(state: np.ndarray, label: str) -> float:
    """Exact expectation of a two-qubit Pauli product.

    ``state`` is a 4-vector (pure) or 4x4 density matrix.  The result is
    real up to 1e-10 numerical residue, which is discarded.
    """
    op = _OPS.get(label)
    if op is None:
        op = pauli_2q(label)
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        val = np.vdot(state, op @ state)
    elif state.shape == (4, 4):
        val = np.trace(op @ state)
    else:
        raise ValueError(f"state must be a 4-vector or 4x4 matrix, got {state.shape}")
    return float(val.real)


def sample_expectation(state: np.ndarray, label: str, shots: int, rng_seed) -> float:
    """Shot-sampled expectation: mean of ``shots`` simulated +-1 outcomes.

    Measurement is in the operator's eigenbasis, so each shot is +1 with
    probability (1 + <P>)/2.  ``rng_seed`` may be an integer seed or a
    numpy Generator; results are deterministic given either.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    p_plus = 0.5 * (1.0 + expectation(state, label))
    p_plus = min(max(p_plus, 0.0), 1.0)
    n_plus = int(rng.binomial(shots, p_plus))
    return (2.0 * n_plus - shots) / shots


def measure_tomogram(state: np.ndarray, t: float, shots: int = 0,
                     rng_seed=None, include_cross: bool = True) -> Tomogram:
    """Build a tomogram of ``state`` at time ``t``.

    shots = 0 gives exact values.  In sampled mode every term is measured
    with an independent substream of the given seed, mirroring separate
    tomography settings per term.
    """
    labels = PAULI_LABELS_2Q + (CROSS_LABELS if include_cross else ())
    if shots == 0:
        values = {lab: expectation(state, lab) for lab in labels}
        return Tomogram(time=t, values=values, shots=0)
    seq = (rng_seed if isinstance(rng_seed, np.random.SeedSequence)
           else np.random.SeedSequence(rng_seed))
    children = seq.spawn(len(labels))
    values = {
        lab: sample_expectation(state, lab, shots, np.random.default_rng(child))
        for lab, child in zip(labels, children)
    }
    return Tomogram(time=t, values=values, shots=shots)


@dataclass(frozen=True)
class EnergyEstimate:
    """Estimated E/h [MHz] at one time with its per-term breakdown.

    contributions keys: z1, z2, x1, x2, xx, yy — the six estimator terms
    with their schedule prefactors applied.  energy is their sum.
    """

    time: float
    energy: float
    contributions: dict[str, float] = field(repr=False)

    def __post_init__(self) -> None:
        total = sum(self.contributions.values())
        if abs(total - self.energy) > 1e-9:
            raise ValueError("energy does not match the sum of its contributions")


def energy_from_correlators(tom: Tomogram, schedule: ProtocolSchedule,
                            t: float | None = None) -> EnergyEstimate:
    """Reconstruct E/h from the six controlled-term correlators.

    ``t`` defaults to the tomogram's own time.  Raises MissingTerm if any
    of the six required correlators is absent.
    """
    t_eval = tom.time if t is None else t
    s = t_eval / schedule.t_ad
    jval = schedule.coupling(t_eval)
    contributions = {
        "z1": (1.0 - s) * 0.5 * schedule.z1 * tom["ZI"],
        "z2": (1.0 - s) * 0.5 * schedule.z2 * tom["IZ"],
        "x1": s * 0.5 * schedule.x1 * tom["XI"],
        "x2": s * 0.5 * schedule.x2 * tom["IX"],
        "xx": jval * 0.25 * tom["XX"],
        "yy": jval * 0.25 * tom["YY"],
    }
    return EnergyEstimate(time=t_eval, energy=sum(contributions.values()),
                          contributions=contributions)


def _rotated_pairs(qubit: int) -> list[tuple[str, str]]:
    """(label, partner) pairs that mix under a Z rotation of ``qubit``.

    Each listed label transforms as X-like against its Y-like partner:
    new[label] = cos*old[label] + sin*old[partner],
    new[partner] = -sin*old[label] + cos*old[partner].
    """
    if qubit == 1:
        return [("XI", "YI"), ("XX", "YX"), ("XY", "YY")]
    if qubit == 2:
        return [("IX", "IY"), ("XX", "XY"), ("YX", "YY")]
    raise BadIndex(f"qubit index must be 1 or 2, got {qubit}")


def rotate_frame(tom: Tomogram, qubit: int, theta: float) -> Tomogram:
    """Rotate one qubit's frame by ``theta`` about Z.

    Transforms <X>' = cos(theta)<X> + sin(theta)<Y> and
    <Y>' = -sin(theta)<X> + cos(theta)<Y> for the chosen qubit; Z terms are
    unchanged.  Two-qubit transverse correlators mix with the XY/YX cross
    terms: those must be present unless XX and YY are both zero.
    """
    pairs = _rotated_pairs(qubit)
    c, s = np.cos(theta), np.sin(theta)
    new_values = dict(tom.values)
    # Statistical noise floor: sampled correlators of a nominally zero term
    # may legitimately sit a few standard errors away from zero.
    eps = 1e-9 if tom.shots == 0 else 3.0 / np.sqrt(tom.shots)
    for x_lab, y_lab in pairs:
        has_x, has_y = x_lab in tom.values, y_lab in tom.values
        if not (has_x and has_y):
            present = tom.values.get(x_lab, tom.values.get(y_lab, 0.0))
            if abs(present) > eps:
                raise MissingTerm(
                    f"rotating qubit {qubit} needs both {x_lab} and {y_lab}; "
                    f"tomogram has a nonzero {x_lab if has_x else y_lab} only"
                )
            continue
        vx, vy = tom.values[x_lab], tom.values[y_lab]
        new_values[x_lab] = c * vx + s * vy
        new_values[y_lab] = -s * vx + c * vy
    return Tomogram(time=tom.time, values=new_values, shots=tom.shots)
