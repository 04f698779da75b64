"""Dyadic frequency analysis and criterion monitoring on the periodic torus.

Layers, bottom up: spectral fields and operators (:mod:`.spectral`),
dyadic blocks (:mod:`.littlewood_paley`), Besov norms (:mod:`.besov`),
interpolation inequalities (:mod:`.inequalities`), periodic-box solvers
(:mod:`.systems`), trajectory monitors (:mod:`.monitor`), and the
checkpoint/restart extension mechanism (:mod:`.extension`).
"""

from .besov import BesovParams, BesovSequence, besov_norm, besov_sequence
from .checkpoint import CheckpointError, decode_checkpoint, encode_checkpoint
from .extension import (
    ExtensionPlan,
    ExtensionResult,
    extend_beyond,
    joint_run,
    local_span,
    plan_from_trajectory,
)
from .fields import random_band_limited, random_solenoidal, single_mode, taylor_green
from .inequalities import (
    AdmissiblePair,
    InterpolationReport,
    admissible_pair,
    criterion_exponent,
    grad_norm_interpolation,
    integrated_log_gradient_bound,
    lp_norm_interpolation,
    validate_criterion,
)
from .littlewood_paley import (
    Annulus,
    CutoffPair,
    DyadicDecomposition,
    LowBall,
    bernstein_ratio,
    build_cutoffs,
    decompose,
    low_pass,
    lp_block,
)
from .monitor import (
    CriterionSpec,
    MonitorReport,
    criterion_integral,
    endpoint_tracker,
    find_smallness_window,
    first_energy_residual,
    first_energy_residual_cubic,
    gronwall_tracker,
    run_monitor,
    second_energy_residual,
)
from .spectral import (
    Grid,
    ParameterError,
    SpectralField,
    dealias,
    derivative,
    lebesgue_norm,
    leray_project,
    make_grid,
    sobolev_norm,
)
from .systems import CflError, SystemSpec, rhs, simulate, step
from .trajectory import (
    SystemState,
    Trajectory,
    TrajectorySample,
    load_trajectory,
    save_trajectory,
)

__version__ = "0.1.0"
