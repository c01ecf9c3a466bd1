"""Interval exchange transformations, Rauzy-Veech induction and special
flows with asymmetric logarithmic singularities, at exact desk scale."""

from .exact import ExactScalar, FieldMismatchError
from .iet import Iet, IntegerOrbit, Permutation, first_return_map, keane_check
from .rauzy import (
    AccelTimes,
    InductionTrace,
    RVUndefinedError,
    balance_check,
    hilbert_distance,
    induct,
    jacobian,
    nu_col,
    positivity_check,
    projective_diameter,
    return_time_oracle,
    rv_step,
    select_accel_times,
    towers,
    zorich_times,
)
from .roof import (
    FlowPoint,
    RoofSpec,
    SingularityTooClose,
    birkhoff_sum,
    discrete_iterations,
    eval_roof,
    eval_roof_derivative,
    flow,
    roof_area,
)
from .zippered import (
    SuspensionData,
    ZipperedRectangles,
    area_normalize,
    backward_rv_step,
    canonical_tau,
    forward_rv_step,
    generic_tau,
    heights_from_tau,
)
from .birkhoff import (
    approach_stats,
    derivative_growth_check,
    prty_conditions,
    sigma,
    sigma_set,
)
from .diophantine import (
    DcParams,
    IndeterminateComparison,
    k_set_membership,
    mixing_dc_report,
    ratner_dc_partial,
    summability_partial,
    validate_params,
)
from .ratner import (
    BumpObservable,
    WitnessConfig,
    forbac_scan,
    induced_discontinuity_gaps,
    mixing_correlation,
    sample_good_pairs,
    sr_pair_test,
    triple_mixing_probe,
    verify_witness_high_precision,
)

__version__ = "0.1.0"
