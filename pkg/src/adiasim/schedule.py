"""Time-dependent two-qubit sweep Hamiltonian and chirped-drive model.

The protocol interpolates between a longitudinal configuration at ``t = 0``
and a transverse one at ``t = t_ad`` while an exchange coupling ramps on:

    H(t)/h [MHz] = (1 - t/t_ad) * (z1*ZI + z2*IZ) / 2
                 + (t/t_ad)     * (x1*XI + x2*IX) / 2
                 + j(t)         * (XX + YY) / 4
                 + zz           * ZZ / 4

with all frequencies in MHz and times in microseconds.  ``h`` is factored
out: dynamics code multiplies by ``2*pi`` when integrating.  The coupling
ramp ``j(t)`` is linear by default (``j(0) = 0``, ``j(t_ad) = j_final``);
alternatively it can follow a cubic-in-amplitude calibration curve
``j = b1*A + b3*A**3`` with the amplitude ``A`` ramped linearly, which
makes ``j(t)`` slightly superlinear in time.

The single-qubit Z ramp is realized by chirping the drive frequency
linearly from ``z`` MHz below the qubit up to resonance.  ``ChirpParams``
and its helpers model that drive phase and the effective fields seen in
the frame co-moving with the chirp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .operators import X as _X, Y as _Y, Z as _Z, embed_1q, pauli_2q

__all__ = [
    "TimeOutOfRange",
    "ProtocolSchedule",
    "ChirpParams",
    "hamiltonian_at",
    "chirp_phase",
    "effective_fields",
    "frame_rotation_angle",
    "chirped_frame_hamiltonian",
    "constant_frame_hamiltonian",
]

_ZI = pauli_2q("ZI")
_IZ = pauli_2q("IZ")
_XI = pauli_2q("XI")
_IX = pauli_2q("IX")
_XXYY = pauli_2q("XX") + pauli_2q("YY")
_ZZ = pauli_2q("ZZ")


class TimeOutOfRange(ValueError):
    """Raised when a schedule is evaluated outside [0, t_ad]."""


def _check_window(t: float, t_ad: float) -> None:
    # Tolerate float round-off at the endpoints (e.g. linspace end).
    slack = 1e-9 * max(1.0, t_ad)
    if t < -slack or t > t_ad + slack:
        raise TimeOutOfRange(f"t = {t} us outside protocol window [0, {t_ad}] us")


@dataclass(frozen=True)
class ProtocolSchedule:
    """Parameters of one sweep protocol.

    z1, z2 : longitudinal splittings at t = 0 [MHz]
    x1, x2 : transverse splittings at t = t_ad [MHz]
    j_final: exchange coupling reached at t = t_ad [MHz]
    zz     : static ZZ coefficient [MHz]
    t_ad   : protocol duration [us]
    j_ramp : "linear" (default) or "amplitude" (cubic calibration curve)
    b1, b3, amp_final : calibration-curve coefficients and final drive
        amplitude; required when j_ramp == "amplitude", in which case
        j_final is derived as b1*amp_final + b3*amp_final**3.
    """

    z1: float
    z2: float
    x1: float
    x2: float
    j_final: float = 0.0
    zz: float = 0.0
    t_ad: float = 10.0
    j_ramp: str = "linear"
    b1: float | None = field(default=None, repr=False)
    b3: float | None = field(default=None, repr=False)
    amp_final: float | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.t_ad <= 0.0:
            raise ValueError(f"t_ad must be positive, got {self.t_ad}")
        if self.j_ramp not in ("linear", "amplitude"):
            raise ValueError(f"unknown j_ramp mode {self.j_ramp!r}")
        if self.j_ramp == "amplitude":
            if self.b1 is None or self.b3 is None or self.amp_final is None:
                raise ValueError("amplitude ramp requires b1, b3 and amp_final")
            derived = self.b1 * self.amp_final + self.b3 * self.amp_final**3
            object.__setattr__(self, "j_final", derived)

    def coupling(self, t: float) -> float:
        """Exchange coupling j(t) [MHz]."""
        _check_window(t, self.t_ad)
        s = min(max(t / self.t_ad, 0.0), 1.0)
        if self.j_ramp == "amplitude":
            amp = self.amp_final * s
            return self.b1 * amp + self.b3 * amp**3
        return self.j_final * s

    def hamiltonian(self, t: float) -> np.ndarray:
        """H(t)/h as a 4x4 complex Hermitian matrix [MHz]."""
        _check_window(t, self.t_ad)
        s = min(max(t / self.t_ad, 0.0), 1.0)
        h = (1.0 - s) * 0.5 * (self.z1 * _ZI + self.z2 * _IZ)
        h = h + s * 0.5 * (self.x1 * _XI + self.x2 * _IX)
        h = h + self.coupling(t) * 0.25 * _XXYY
        h = h + self.zz * 0.25 * _ZZ
        return h

    def with_(self, **changes) -> "ProtocolSchedule":
        """Return a copy with the given fields replaced."""
        return replace(self, **changes)

    def coupling_off(self) -> "ProtocolSchedule":
        """Copy with every two-qubit coupling removed (j = 0 and zz = 0).

        This defines the bare crossing reference: with any coupling left in,
        the level crossing opens into an avoided one and the tracked level
        difference is no longer linear through it.
        """
        kwargs = dict(j_final=0.0, zz=0.0)
        if self.j_ramp == "amplitude":
            kwargs.update(j_ramp="linear", b1=None, b3=None, amp_final=None)
        return self.with_(**kwargs)


def hamiltonian_at(schedule: ProtocolSchedule, t: float) -> np.ndarray:
    """Functional alias for ``schedule.hamiltonian(t)``."""
    return schedule.hamiltonian(t)


@dataclass(frozen=True)
class ChirpParams:
    """Linearly chirped drive tone.

    f    : final drive frequency [MHz]
    z    : initial frequency offset below f [MHz]; the instantaneous drive
           frequency is f - z*(1 - t/t_ad)
    phi0 : initial drive phase [rad]
    t_ad : ramp duration [us]
    """

    f: float
    z: float
    phi0: float = 0.0
    t_ad: float = 10.0

    def __post_init__(self) -> None:
        if self.t_ad <= 0.0:
            raise ValueError(f"t_ad must be positive, got {self.t_ad}")


def chirp_phase(c: ChirpParams, t: float) -> float:
    """Accumulated drive phase [rad] at time ``t`` [us].

    phi(t) = phi0 + 2*pi*(f - z)*t + pi*z*t**2/t_ad, so the instantaneous
    frequency d(phi)/dt / (2*pi) ramps linearly from f - z up to f.
    """
    _check_window(t, c.t_ad)
    return c.phi0 + 2.0 * math.pi * (c.f - c.z) * t + math.pi * c.z * t * t / c.t_ad


def effective_fields(c: ChirpParams, amplitude: float, t: float) -> tuple[float, float, float]:
    """Field coefficients [MHz] in the frame co-moving with the chirp.

    Returns ``(zCoeff, xCoeff, yCoeff)`` such that the single-qubit
    Hamiltonian in this frame is ``zCoeff*Z + xCoeff*X + yCoeff*Y``:
    the residual detuning gives ``zCoeff = z*(1 - t/t_ad)/2`` and the
    drive of instantaneous ``amplitude`` [MHz] is static along the axis
    set by its initial phase, ``(amplitude/2)*(cos(phi0), sin(phi0))``.
    """
    _check_window(t, c.t_ad)
    z_coeff = 0.5 * c.z * (c.t_ad - t) / c.t_ad
    return (z_coeff, 0.5 * amplitude * math.cos(c.phi0), 0.5 * amplitude * math.sin(c.phi0))


def frame_rotation_angle(z: float, t: float, t_ad: float) -> float:
    """Angle [rad] between the chirped frame and the constant-frequency frame.

    The difference of the accumulated phases of a chirped tone and a
    constant tone at the final frequency is
    ``theta(t) = 2*pi*z*t - pi*z*t**2/t_ad = 2*pi*z*t*(1 - t/(2*t_ad))``;
    rotating transverse expectation values by this angle maps data taken
    in the constant-frequency frame onto the chirped frame.
    """
    return 2.0 * math.pi * z * t * (1.0 - t / (2.0 * t_ad))


def chirped_frame_hamiltonian(z: float, x: float, t_ad: float, qubit: int = 2):
    """Single-qubit sweep H(t) in the frame co-moving with the chirped drive.

    The residual detuning ramps down while the drive envelope ramps up:

        H(t)/h = (1 - t/t_ad)*(z/2)*Z + (t/t_ad)*(x/2)*X

    on the chosen qubit (the other idles).  Returns ``t -> 4x4 matrix``.
    """
    op_z = embed_1q(_Z, qubit)
    op_x = embed_1q(_X, qubit)

    def ham(t: float) -> np.ndarray:
        _check_window(t, t_ad)
        s = min(max(t / t_ad, 0.0), 1.0)
        return (1.0 - s) * 0.5 * z * op_z + s * 0.5 * x * op_x

    return ham


def constant_frame_hamiltonian(z: float, x: float, t_ad: float, qubit: int = 2):
    """The same sweep viewed from the constant-frequency (final-tone) frame.

    The qubit is resonant in this frame, so no Z term remains, but the
    drive axis precesses by the running frame angle ``theta(t)``:

        H(t)/h = (t/t_ad)*(x/2)*(cos(theta) X + sin(theta) Y),
        theta(t) = 2*pi*z*t*(1 - t/(2*t_ad)).

    Returns ``t -> 4x4 matrix`` on the chosen qubit (the other idles).
    """
    op_x = embed_1q(_X, qubit)
    op_y = embed_1q(_Y, qubit)

    def ham(t: float) -> np.ndarray:
        _check_window(t, t_ad)
        s = min(max(t / t_ad, 0.0), 1.0)
        theta = frame_rotation_angle(z, t, t_ad)
        return s * 0.5 * x * (math.cos(theta) * op_x + math.sin(theta) * op_y)

    return ham
