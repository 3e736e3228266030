"""Two-qubit adiabatic-sweep simulator and analysis toolkit.

Core pieces:

* schedule     — the time-dependent sweep Hamiltonian and chirp model
* dynamics     — Schrodinger / Lindblad RK4 propagation
* tomography   — correlators, shot sampling, energy estimates, frame rotation
* analysis     — spectral traces, minimum gap, diabatic slope, LZ formula
* mitigation   — zero-protocol-time extrapolation of energy contributions
* calibration  — chevron maps and coupling/dispersive fits
* config, scenarios, cli — reproducible scenario runs and data files
"""

from ._version import __version__
from .analysis import (
    CrossingReport,
    DegenerateTracking,
    GridMismatch,
    NoInteriorMinimum,
    SpectralTrace,
    WindowOutOfRange,
    ZeroSlope,
    crossing_report,
    diabatic_slope,
    initial_level_for_state,
    level_populations,
    lz_probability,
    min_gap,
    passage_fidelity,
    spectral_trace,
)
from .calibration import (
    ChevronMap,
    CouplingModel,
    DegenerateBasis,
    InsufficientSpan,
    chevron_map,
    fit_coupling,
    fit_dispersive,
    fit_rabi,
    oscillation_frequency,
    swap_population,
)
from .config import ConfigParse, SCENARIO_NAMES, ScenarioConfig, load_config, validate_config
from .dynamics import (
    BadIndex,
    NoiseModel,
    StepTooLarge,
    Trajectory,
    UnphysicalNoise,
    basis_state,
    collapse_operators,
    propagate_custom,
    propagate_lindblad,
    propagate_unitary,
    sigma_ops,
)
from .mitigation import (
    DegenerateAbscissae,
    MitigatedEnergy,
    SchedulesMismatch,
    extrapolate_quadratic,
    mitigate_energy,
)
from .schedule import (
    ChirpParams,
    ProtocolSchedule,
    TimeOutOfRange,
    chirp_phase,
    chirped_frame_hamiltonian,
    constant_frame_hamiltonian,
    effective_fields,
    frame_rotation_angle,
    hamiltonian_at,
)
from .scenarios import Unwritable, read_trace_config, run_scenario
from .tomography import (
    EnergyEstimate,
    MissingTerm,
    Tomogram,
    energy_from_correlators,
    expectation,
    measure_tomogram,
    rotate_frame,
    sample_expectation,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
