"""Propagation of pure states (Schrodinger) and density matrices (Lindblad).

Fixed-step RK4 with the Hamiltonian evaluated at the substage times
(t, t + dt/2, t + dt).  Hamiltonians are stored as H/h in MHz and times in
microseconds, so the equations of motion carry an explicit 2*pi:

    d|psi>/dt = -i * 2*pi * H(t) |psi>
    d rho/dt  = -i * 2*pi * [H(t), rho] + sum_k ( L_k rho L_k+
                                                  - {L_k+ L_k, rho} / 2 )

Decay rates are genuine inverse times (no 2*pi): a qubit with relaxation
time T1 loses excited-state population as exp(-t/T1).

There is no renormalization during integration; norm/trace drift is
recorded per sample and an error is raised if it exceeds 1e-4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .operators import SIGMA_MINUS, SIGMA_PLUS, Z, dagger, embed_1q
from .schedule import ProtocolSchedule

__all__ = [
    "StepTooLarge",
    "UnphysicalNoise",
    "BadIndex",
    "NoiseModel",
    "Trajectory",
    "basis_state",
    "sigma_ops",
    "collapse_operators",
    "propagate_unitary",
    "propagate_lindblad",
    "propagate_custom",
]

BASIS_LABELS = ("00", "01", "10", "11")

_DRIFT_LIMIT = 1e-4


class StepTooLarge(RuntimeError):
    """Raised when integration drift exceeds the 1e-4 safety threshold."""


class UnphysicalNoise(ValueError):
    """Raised for noise parameters with a negative pure-dephasing rate."""


class BadIndex(ValueError):
    """Raised for a qubit index outside {1, 2} or an unknown basis label."""


def basis_state(label: str) -> np.ndarray:
    """Return the computational basis vector for a label in {00, 01, 10, 11}."""
    try:
        idx = BASIS_LABELS.index(label)
    except ValueError:
        raise BadIndex(f"unknown basis label {label!r}") from None
    psi = np.zeros(4, dtype=complex)
    psi[idx] = 1.0
    return psi


def sigma_ops(qubit: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (sigma-, sigma+, sigma_z) for one qubit as 4x4 operators.

    ``qubit`` is 1-based.  sigma- lowers toward |0> (sigma-|1> = |0>),
    and [sigma+, sigma-] = sigma_z with Z = diag(-1, +1).
    """
    if qubit not in (1, 2):
        raise BadIndex(f"qubit index must be 1 or 2, got {qubit}")
    return (
        embed_1q(SIGMA_MINUS, qubit),
        embed_1q(SIGMA_PLUS, qubit),
        embed_1q(Z, qubit),
    )


def _as_pair(value) -> tuple[float, float]:
    if np.isscalar(value):
        return (float(value), float(value))
    pair = tuple(float(v) for v in value)
    if len(pair) != 2:
        raise ValueError(f"expected a scalar or a pair, got {value!r}")
    return pair


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit relaxation/dephasing parameters.

    t1, t2 : relaxation and coherence times [us]; scalars broadcast to
             both qubits; ``math.inf`` disables a channel (an infinite t2
             means no pure dephasing beyond the T1-induced part).
    n_th   : thermal occupation feeding the excitation channel (default 0).

    The pure-dephasing time follows from 1/T_phi = 1/T2 - 1/(2*T1), which
    requires T2 <= 2*T1 on each qubit whenever both are finite.
    """

    t1: tuple[float, float] = (math.inf, math.inf)
    t2: tuple[float, float] = (math.inf, math.inf)
    n_th: tuple[float, float] = (0.0, 0.0)

    def __init__(self, t1=math.inf, t2=math.inf, n_th=0.0):
        object.__setattr__(self, "t1", _as_pair(t1))
        object.__setattr__(self, "t2", _as_pair(t2))
        object.__setattr__(self, "n_th", _as_pair(n_th))
        for q in range(2):
            if self.t1[q] <= 0 or self.t2[q] <= 0:
                raise UnphysicalNoise(
                    f"qubit {q + 1}: T1 and T2 must be positive (or inf), "
                    f"got T1={self.t1[q]}, T2={self.t2[q]}"
                )
            if math.isfinite(self.t2[q]) and self.t2[q] > 2.0 * self.t1[q]:
                raise UnphysicalNoise(
                    f"qubit {q + 1}: T2 = {self.t2[q]} us exceeds 2*T1 = "
                    f"{2.0 * self.t1[q]} us (negative pure-dephasing rate)"
                )
            if self.n_th[q] < 0:
                raise UnphysicalNoise(f"qubit {q + 1}: n_th must be >= 0")

    @classmethod
    def off(cls) -> "NoiseModel":
        """Noise-free model (all channels disabled)."""
        return cls()

    @property
    def is_trivial(self) -> bool:
        """True when every channel rate is exactly zero."""
        return all(math.isinf(t) for t in self.t1 + self.t2) and all(
            n == 0.0 for n in self.n_th
        )


def collapse_operators(noise: NoiseModel) -> list[np.ndarray]:
    """Lindblad operators for the noise model, as 4x4 matrices.

    Per qubit: relaxation sqrt((1+n_th)/T1) sigma-, thermal excitation
    sqrt(n_th/T1) sigma+, pure dephasing sqrt(1/(2*T_phi)) sigma_z.
    Channels with zero rate are omitted.
    """
    ops: list[np.ndarray] = []
    for q in (1, 2):
        t1 = noise.t1[q - 1]
        t2 = noise.t2[q - 1]
        nth = noise.n_th[q - 1]
        sm, sp, sz = sigma_ops(q)
        gamma_down = (1.0 + nth) / t1 if math.isfinite(t1) else 0.0
        gamma_up = nth / t1 if math.isfinite(t1) else 0.0
        if math.isinf(t2):
            # T2 not specified: no pure dephasing beyond the T1-induced part.
            rate_phi = 0.0
        else:
            rate_phi = 1.0 / t2 - (0.0 if math.isinf(t1) else 0.5 / t1)
            if rate_phi < -1e-12:
                raise UnphysicalNoise(f"qubit {q}: negative pure-dephasing rate")
            rate_phi = max(rate_phi, 0.0)
        if gamma_down > 0.0:
            ops.append(math.sqrt(gamma_down) * sm)
        if gamma_up > 0.0:
            ops.append(math.sqrt(gamma_up) * sp)
        if rate_phi > 0.0:
            ops.append(math.sqrt(0.5 * rate_phi) * sz)
    return ops


@dataclass
class Trajectory:
    """Sampled result of one propagation.

    times  : (n_samples+1,) sample times, 0 .. t_ad [us]
    states : (n_samples+1, 4) complex amplitudes for pure runs, or
             (n_samples+1, 4, 4) density matrices for Lindblad runs
    drifts : |norm - 1| (pure) or |trace - 1| (mixed) at each sample
    """

    times: np.ndarray
    states: np.ndarray
    drifts: np.ndarray
    schedule: ProtocolSchedule | None = field(default=None, repr=False)

    @property
    def is_mixed(self) -> bool:
        return self.states.ndim == 3

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def max_drift(self) -> float:
        return float(np.max(self.drifts))


def _sample_grid(t_ad: float, dt: float, n_samples: int) -> tuple[np.ndarray, int, float]:
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if dt > t_ad / 100.0 + 1e-15:
        raise ValueError(f"dt = {dt} us too coarse; need dt <= t_ad/100 = {t_ad / 100.0}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    times = np.linspace(0.0, t_ad, n_samples + 1)
    interval = t_ad / n_samples
    steps = max(1, math.ceil(interval / dt - 1e-12))
    return times, steps, interval / steps


def _rk4_pure(ham, psi: np.ndarray, t: float, h: float) -> np.ndarray:
    w = -2.0j * math.pi
    k1 = w * (ham(t) @ psi)
    h_mid = ham(t + 0.5 * h)
    k2 = w * (h_mid @ (psi + 0.5 * h * k1))
    k3 = w * (h_mid @ (psi + 0.5 * h * k2))
    k4 = w * (ham(t + h) @ (psi + h * k3))
    return psi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _propagate_pure(ham, t_ad: float, psi0: np.ndarray, dt: float, n_samples: int,
                    schedule: ProtocolSchedule | None) -> Trajectory:
    psi0 = np.asarray(psi0, dtype=complex).reshape(4)
    norm0 = float(np.linalg.norm(psi0))
    if abs(norm0 - 1.0) > 1e-6:
        raise ValueError(f"initial state norm {norm0} differs from 1 by > 1e-6")
    times, steps, h = _sample_grid(t_ad, dt, n_samples)
    states = np.empty((len(times), 4), dtype=complex)
    drifts = np.empty(len(times))
    psi = psi0.copy()
    states[0] = psi
    drifts[0] = abs(norm0 - 1.0)
    for k in range(1, len(times)):
        t = times[k - 1]
        for step in range(steps):
            psi = _rk4_pure(ham, psi, t + step * h, h)
        drift = abs(float(np.linalg.norm(psi)) - 1.0)
        if drift > _DRIFT_LIMIT:
            raise StepTooLarge(
                f"norm drift {drift:.3e} exceeds {_DRIFT_LIMIT:.0e} at "
                f"t = {times[k]:.4f} us; reduce dt"
            )
        states[k] = psi
        drifts[k] = drift
    return Trajectory(times=times, states=states, drifts=drifts, schedule=schedule)


def propagate_unitary(schedule: ProtocolSchedule, psi0: np.ndarray,
                      dt: float = 0.002, n_samples: int = 300) -> Trajectory:
    """Integrate the Schrodinger equation for a sweep protocol.

    ``psi0`` must be normalized.  The trajectory is sampled on a uniform
    grid of ``n_samples + 1`` points from 0 to t_ad; between samples the
    integrator takes uniform RK4 steps of size <= dt.
    """
    return _propagate_pure(schedule.hamiltonian, schedule.t_ad, psi0, dt,
                           n_samples, schedule)


def propagate_custom(ham, t_ad: float, psi0: np.ndarray,
                     dt: float = 0.002, n_samples: int = 300) -> Trajectory:
    """Integrate the Schrodinger equation for an arbitrary H(t) callable.

    ``ham(t)`` must return a 4x4 Hermitian matrix in MHz for t in [0, t_ad].
    """
    return _propagate_pure(ham, t_ad, psi0, dt, n_samples, None)


def _dissipator_matrix(noise: NoiseModel) -> np.ndarray:
    """Constant superoperator M with D(rho).ravel() == M @ rho.ravel().

    Uses the row-major vectorization identity
    vec(A rho B) = kron(A, B.T) vec(rho).
    """
    eye = np.eye(4, dtype=complex)
    m = np.zeros((16, 16), dtype=complex)
    for lop in collapse_operators(noise):
        ld = dagger(lop)
        ldl = ld @ lop
        m += np.kron(lop, ld.T)
        m -= 0.5 * (np.kron(ldl, eye) + np.kron(eye, ldl.T))
    return m


def propagate_lindblad(schedule: ProtocolSchedule, rho0: np.ndarray,
                       noise: NoiseModel, dt: float = 0.002,
                       n_samples: int = 300) -> Trajectory:
    """Integrate the Lindblad master equation for a sweep protocol.

    ``rho0`` may be given as a density matrix or as a pure-state vector
    (converted to its projector).  With a trivial noise model this reduces
    to the unitary evolution of propagate_unitary.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim == 1:
        rho0 = np.outer(rho0, rho0.conj())
    if rho0.shape != (4, 4):
        raise ValueError(f"rho0 must be a 4x4 matrix, got shape {rho0.shape}")
    if abs(float(np.trace(rho0).real) - 1.0) > 1e-6:
        raise ValueError("initial density matrix trace differs from 1 by > 1e-6")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-8:
        raise ValueError("initial density matrix is not Hermitian")

    ham = schedule.hamiltonian
    diss = _dissipator_matrix(noise)
    w = -2.0j * math.pi

    def rhs(t: float, rho: np.ndarray, h_t: np.ndarray | None = None) -> np.ndarray:
        h_mat = ham(t) if h_t is None else h_t
        out = w * (h_mat @ rho - rho @ h_mat)
        out += (diss @ rho.ravel()).reshape(4, 4)
        return out

    times, steps, h = _sample_grid(schedule.t_ad, dt, n_samples)
    states = np.empty((len(times), 4, 4), dtype=complex)
    drifts = np.empty(len(times))
    rho = rho0.copy()
    states[0] = rho
    drifts[0] = abs(float(np.trace(rho).real) - 1.0)
    for k in range(1, len(times)):
        t0 = times[k - 1]
        for step in range(steps):
            t = t0 + step * h
            h_mid = ham(t + 0.5 * h)
            k1 = rhs(t, rho)
            k2 = rhs(t, rho + 0.5 * h * k1, h_mid)
            k3 = rhs(t, rho + 0.5 * h * k2, h_mid)
            k4 = rhs(t, rho + h * k3, ham(t + h))
            rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        drift = abs(float(np.trace(rho).real) - 1.0)
        if drift > _DRIFT_LIMIT:
            raise StepTooLarge(
                f"trace drift {drift:.3e} exceeds {_DRIFT_LIMIT:.0e} at "
                f"t = {times[k]:.4f} us; reduce dt"
            )
        states[k] = rho
        drifts[k] = drift
    return Trajectory(times=times, states=states, drifts=drifts, schedule=schedule)
