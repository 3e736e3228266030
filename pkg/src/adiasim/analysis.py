"""Instantaneous spectra, level tracking, gap/slope extraction, LZ formula.

Levels are numbered 1..4.  Two labelings coexist:

* sorted levels  — ascending eigenvalue at each time (curves never cross);
* tracked levels — continuity labels assigned by maximal overlap between
  eigenvectors at consecutive grid times, seeded by the ascending order
  at t = 0 (curves may cross; these are the adiabatically-continued
  branches).

The crossing of interest in the sweep protocol involves the middle pair,
sorted levels (2, 3), which is the default everywhere a pair is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dynamics import Trajectory
from .schedule import ProtocolSchedule

__all__ = [
    "DegenerateTracking",
    "NoInteriorMinimum",
    "WindowOutOfRange",
    "ZeroSlope",
    "GridMismatch",
    "SpectralTrace",
    "CrossingReport",
    "spectral_trace",
    "min_gap",
    "diabatic_slope",
    "lz_probability",
    "passage_fidelity",
    "crossing_report",
    "level_populations",
    "initial_level_for_state",
]

_TIE_TOL = 1e-9


class DegenerateTracking(RuntimeError):
    """Raised when continuity labeling is ambiguous (tied overlaps)."""


class NoInteriorMinimum(ValueError):
    """Raised when a gap curve attains its minimum at a grid endpoint."""


class WindowOutOfRange(ValueError):
    """Raised when a fit window extends beyond the protocol interval."""


class ZeroSlope(ValueError):
    """Raised when the LZ formula is evaluated with a vanishing slope."""


class GridMismatch(ValueError):
    """Raised when a trajectory and a spectral trace are incompatible."""


@dataclass
class SpectralTrace:
    """Eigen-decomposition of H(t) along a uniform grid.

    times           : (n,) grid times [us]
    sorted_energies : (n, 4) ascending eigenvalues [MHz]
    energies        : (n, 4) tracked (continuity-labeled) eigenvalues;
                      column k follows the level that was k-th lowest at t=0
    vectors         : (n, 4, 4) tracked eigenvectors, vectors[i][:, k] is the
                      eigenvector of tracked level k+1 at times[i], with the
                      global phase fixed so successive overlaps are real
                      and positive
    schedule        : the schedule the trace was built from (any object with
                      ``t_ad`` and ``hamiltonian(t)``)
    """

    times: np.ndarray
    sorted_energies: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray = field(repr=False)
    schedule: object | None = field(default=None, repr=False)

    @property
    def n_grid(self) -> int:
        return len(self.times)


def _track_step(prev_vecs: np.ndarray, vals: np.ndarray, vecs: np.ndarray,
                t: float) -> tuple[np.ndarray, np.ndarray]:
    """Reorder/phase-fix the new eigenpairs to continue the previous labels."""
    overlap = np.abs(prev_vecs.conj().T @ vecs)  # overlap[k, l]
    for k in range(4):
        row = np.sort(overlap[k])[::-1]
        if row[0] - row[1] < _TIE_TOL:
            raise DegenerateTracking(
                f"ambiguous level continuation at t = {t:.6f} us: "
                f"two overlaps of tracked level {k + 1} tie at {row[0]:.6f}"
            )
    rows, cols = linear_sum_assignment(-overlap)
    perm = np.empty(4, dtype=int)
    perm[rows] = cols
    new_vals = vals[perm]
    new_vecs = vecs[:, perm]
    for k in range(4):
        phase = np.vdot(prev_vecs[:, k], new_vecs[:, k])
        if abs(phase) > 0.0:
            new_vecs[:, k] *= phase.conj() / abs(phase)
    return new_vals, new_vecs


def _tracked_eigensystem(schedule, times: np.ndarray):
    """eigh along ``times`` with continuity labels seeded at the first time."""
    n = len(times)
    sorted_e = np.empty((n, 4))
    tracked_e = np.empty((n, 4))
    tracked_v = np.empty((n, 4, 4), dtype=complex)
    vals, vecs = np.linalg.eigh(schedule.hamiltonian(times[0]))
    sorted_e[0] = vals
    tracked_e[0] = vals
    tracked_v[0] = vecs
    prev = vecs
    for i in range(1, n):
        vals, vecs = np.linalg.eigh(schedule.hamiltonian(times[i]))
        sorted_e[i] = vals
        tvals, tvecs = _track_step(prev, vals, vecs, times[i])
        tracked_e[i] = tvals
        tracked_v[i] = tvecs
        prev = tvecs
    return sorted_e, tracked_e, tracked_v


def spectral_trace(schedule, n_grid: int = 1001) -> SpectralTrace:
    """Diagonalize H(t) on a uniform grid with continuity-labeled levels.

    ``schedule`` needs a ``t_ad`` attribute and a ``hamiltonian(t)`` method
    (any ProtocolSchedule qualifies).  Raises DegenerateTracking when the
    label continuation is ambiguous at some step.
    """
    if n_grid < 3:
        raise ValueError(f"n_grid must be >= 3, got {n_grid}")
    times = np.linspace(0.0, schedule.t_ad, n_grid)
    sorted_e, tracked_e, tracked_v = _tracked_eigensystem(schedule, times)
    return SpectralTrace(times=times, sorted_energies=sorted_e,
                         energies=tracked_e, vectors=tracked_v, schedule=schedule)


def _check_pair(pair: tuple[int, int]) -> tuple[int, int]:
    lo, hi = sorted(pair)
    if not (1 <= lo <= 4 and 1 <= hi <= 4) or lo == hi:
        raise ValueError(f"level pair must be two distinct levels in 1..4, got {pair}")
    return lo, hi


def min_gap(trace: SpectralTrace, pair: tuple[int, int] = (2, 3)) -> tuple[float, float]:
    """Minimum separation of two sorted eigenvalue curves.

    Returns ``(a, t_c)``: the gap minimum [MHz] and its time [us], found by
    golden-section refinement around the coarse grid minimum (gap-value
    tolerance 1e-4 MHz).  Raises NoInteriorMinimum when the coarse minimum
    sits on a grid endpoint, i.e. the gap is monotonic over the grid.
    """
    lo, hi = _check_pair(pair)
    gaps = trace.sorted_energies[:, hi - 1] - trace.sorted_energies[:, lo - 1]
    idx = int(np.argmin(gaps))
    if idx == 0 or idx == trace.n_grid - 1:
        raise NoInteriorMinimum(
            f"gap of sorted levels {(lo, hi)} is minimal at the grid edge "
            f"t = {trace.times[idx]:.6f} us; no interior avoided crossing"
        )
    if trace.schedule is None:
        raise ValueError("trace carries no schedule; cannot refine the gap")
    ham = trace.schedule.hamiltonian

    def gap_at(t: float) -> float:
        vals = np.linalg.eigvalsh(ham(t))
        return float(vals[hi - 1] - vals[lo - 1])

    # Golden-section refinement inside the bracketing grid cell pair; the
    # bracket is shrunk far enough that the gap value is converged well
    # below the 1e-4 MHz tolerance.
    a, b = float(trace.times[idx - 1]), float(trace.times[idx + 1])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = gap_at(c), gap_at(d)
    while b - a > 1e-10 * max(1.0, trace.times[-1]):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = gap_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = gap_at(d)
    best_t, best_g = (c, fc) if fc < fd else (d, fd)
    return float(best_g), float(best_t)


def diabatic_slope(schedule: ProtocolSchedule, pair: tuple[int, int] = (2, 3),
                   t_c: float | None = None, window_fraction: float = 0.10,
                   n_grid: int = 1001) -> float:
    """Slope magnitude [MHz/us] of the bare crossing-level difference.

    Rebuilds the spectral trace with every two-qubit coupling removed
    (j = 0 and zz = 0), takes the tracked (continuity-labeled) difference
    of the pair — a signed quantity that passes through zero at the bare
    crossing — and fits a line over a window centered on ``t_c`` of total
    width ``window_fraction * t_ad``.  The zz term must go too: it opens
    its own tiny avoided crossing which the tracked difference would
    follow, ruining the linearity of the fit (and the window-stability of
    the slope) through the crossing.
    """
    if t_c is None:
        raise ValueError("t_c is required (obtain it from min_gap)")
    lo, hi = _check_pair(pair)
    if not 0.0 < window_fraction:
        raise ValueError(f"window_fraction must be positive, got {window_fraction}")
    half = 0.5 * window_fraction * schedule.t_ad
    t_min, t_max = t_c - half, t_c + half
    if t_min < 0.0 or t_max > schedule.t_ad:
        raise WindowOutOfRange(
            f"fit window [{t_min:.4f}, {t_max:.4f}] us exceeds the protocol "
            f"interval [0, {schedule.t_ad}] us"
        )
    bare = spectral_trace(schedule.coupling_off(), n_grid)
    mask = (bare.times >= t_min) & (bare.times <= t_max)
    if int(np.count_nonzero(mask)) < 2:
        raise WindowOutOfRange(
            f"fit window [{t_min:.4f}, {t_max:.4f}] us contains fewer than "
            f"two grid points; increase n_grid"
        )
    diff = bare.energies[mask, hi - 1] - bare.energies[mask, lo - 1]
    slope = np.polyfit(bare.times[mask], diff, 1)[0]
    return float(abs(slope))


def lz_probability(a: float, alpha: float) -> tuple[float, float]:
    """Dimensionless LZ exponent and diabatic-transition probability.

    For a minimum gap ``a`` [MHz] and a bare-level-difference slope
    ``alpha`` [MHz/us], in these units

        Gamma = pi * a**2 / (2 * |alpha|),     P_diabatic = exp(-2*pi*Gamma).

    (The exponent collects the 2*pi-per-MHz angular-frequency factors of
    both a and alpha; a 0.22 MHz gap swept at 10.3 MHz per 15 us gives
    Gamma = 0.1107 and P = 0.4987.)
    """
    if a < 0.0:
        raise ValueError(f"gap must be nonnegative, got {a}")
    if alpha == 0.0:
        raise ZeroSlope("slope alpha must be nonzero")
    gamma = math.pi * a * a / (2.0 * abs(alpha))
    return gamma, math.exp(-2.0 * math.pi * gamma)


def passage_fidelity(traj: Trajectory, trace: SpectralTrace, level: int = 2) -> np.ndarray:
    """Overlap of a trajectory with one adiabatically-continued level.

    Returns ``|<v_level(t)|psi(t)>|**2`` (or ``Tr(rho |v><v|)`` for mixed
    states) at every trajectory sample.  ``level`` is a tracked label,
    1..4, with the labeling convention of ``trace``.  The eigenvectors are
    re-tracked on the trajectory's own grid; GridMismatch is raised when
    the trajectory and trace do not share a schedule.
    """
    if not 1 <= level <= 4:
        raise ValueError(f"level must be in 1..4, got {level}")
    if traj.schedule is None or trace.schedule is None:
        raise GridMismatch("both trajectory and trace must carry a schedule")
    if traj.schedule != trace.schedule:
        raise GridMismatch("trajectory and trace were built from different schedules")
    if abs(traj.times[0]) > 1e-12 or abs(traj.times[-1] - trace.times[-1]) > 1e-9:
        raise GridMismatch("trajectory grid does not span the trace interval")
    _, _, vecs = _tracked_eigensystem(traj.schedule, traj.times)
    fid = np.empty(len(traj.times))
    for i in range(len(traj.times)):
        v = vecs[i][:, level - 1]
        state = traj.states[i]
        if traj.is_mixed:
            fid[i] = float(np.real(v.conj() @ state @ v))
        else:
            fid[i] = float(abs(np.vdot(v, state)) ** 2)
    return fid


def level_populations(state: np.ndarray, schedule: ProtocolSchedule,
                      t: float) -> np.ndarray:
    """Populations of the four sorted instantaneous levels at time ``t``."""
    _, vecs = np.linalg.eigh(schedule.hamiltonian(t))
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        return np.abs(vecs.conj().T @ state) ** 2
    return np.real(np.diag(vecs.conj().T @ state @ vecs))


def initial_level_for_state(trace: SpectralTrace, psi0: np.ndarray) -> int:
    """Tracked level (1..4) that best overlaps ``psi0`` at t = 0."""
    psi0 = np.asarray(psi0, dtype=complex)
    overlaps = np.abs(trace.vectors[0].conj().T @ psi0) ** 2
    return int(np.argmax(overlaps)) + 1


@dataclass(frozen=True)
class CrossingReport:
    """Summary of one avoided crossing of a sweep protocol.

    a          : minimum gap [MHz]
    t_c        : crossing time [us]
    alpha      : bare-level-difference slope magnitude [MHz/us]
    gamma      : LZ exponent (dimensionless)
    p_diabatic : diabatic transition probability
    """

    a: float
    t_c: float
    alpha: float
    gamma: float
    p_diabatic: float

    def __post_init__(self) -> None:
        if self.a < 0.0 or self.gamma < 0.0:
            raise ValueError("gap and exponent must be nonnegative")
        if not 0.0 <= self.p_diabatic <= 1.0:
            raise ValueError("diabatic probability must lie in [0, 1]")


def crossing_report(schedule: ProtocolSchedule, pair: tuple[int, int] = (2, 3),
                    n_grid: int = 1001) -> CrossingReport:
    """Full crossing analysis: gap, crossing time, slope, LZ prediction."""
    trace = spectral_trace(schedule, n_grid)
    a, t_c = min_gap(trace, pair)
    alpha = diabatic_slope(schedule, pair, t_c)
    gamma, p_diab = lz_probability(a, alpha)
    return CrossingReport(a=a, t_c=t_c, alpha=alpha, gamma=gamma, p_diabatic=p_diab)
