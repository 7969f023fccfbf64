"""Gap estimation from filtered time series of Trotterized spin-chain evolution."""

from .errors import (DataError, GapSearchError, GaplabError, NumericError,
                     ParameterError, ResourceLimitError)
from .gapfinder import (GapEstimate, GapSearchConfig, SweepRecord, SweepResult,
                        empirical_depth_cutoff, find_gap, gap_error,
                        spectral_error, spectral_error_bound, theta_sweep)
from .model import (BoundSet, CommutatorSet, EigenDecomposition, SpinModel,
                    build_hamiltonians, commutator_norm_bounds, dispersion,
                    exact_diagonalize, exact_gap_thermodynamic,
                    explicit_commutators, perturbative_gap_guess, spectral_norm)
from .scaling import (Extrapolation, PhaseDiagram, ScalingSample, extrapolate,
                      phase_diagram)
from .simulator import (Gate, InputOrientation, TimeGrid, TimeSeries,
                        gate_sequence, prepare_input, propagator_overlap,
                        run_time_series)
from .spectral import (Spectrum, default_grid, exact_spectrum_oracle,
                       filter_fourier, spectral_function)
from .toymodel import PeakShiftResult, TwoPeakModel, peak_shift, two_peak_spectrum
from .trotter import (KAPPA4, Filter, TrotterPlan, depth_cutoff, filter_value,
                      gate_count, single_step_unitary, trotter_propagator,
                      truncation_error_bound)

__version__ = "0.1.0"
