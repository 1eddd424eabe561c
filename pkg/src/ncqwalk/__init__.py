"""Discrete-time quantum walk with a two-rotation coin: evolution, band
structure, gap closings and invariants, localization, and a fiber-loop
experiment model."""

from ncqwalk._backend import BACKEND
from ncqwalk.coins import CoinParams, coin, is_unitary, rotation_axis, rotation_x, rotation_y
from ncqwalk.errors import (
    DegenerateDistributionError,
    DegeneratePointError,
    InvalidArgumentError,
    NCQWalkError,
    NoSignalError,
    ResolutionError,
    UnsupportedSizeError,
)
from ncqwalk.experiment import (
    BinnedHistogram,
    LoopParams,
    WaveplateSetting,
    arrival_time,
    detection_probability,
    expected_counts,
    ingest_histogram,
    max_steps,
    multiphoton_probability,
    rebin,
    simulate_histogram,
    waveplate_settings,
)
from ncqwalk.momentum import (
    BandStructure,
    band_structure,
    bloch_unitary,
    bloch_vector,
    momentum_evolve_oracle,
    quasi_energy,
)
from ncqwalk.observables import (
    GAMMA_POINTS,
    LocalizationReport,
    PositionDistribution,
    adaptive_localization,
    gamma_scan,
    localization_parameter,
    position_distribution,
    similarity,
    trajectory_scan,
)
from ncqwalk.topology import (
    DiracPoint,
    GapReport,
    InvariantPair,
    PhaseDiagram,
    closed_form_gap,
    dirac_points,
    gap_report,
    invariants,
    phase_diagram,
)
from ncqwalk.walk import InitialState, Spinor, WalkState, evolve, path_sum_oracle, step

__version__ = "0.1.0"
