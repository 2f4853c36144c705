"""blinkforge: EOG blink identification and EDA stress-feature toolkit.

Signal filtering, peak detection and segmentation, per-blink and
per-window feature catalogs, threshold culling bound search, exact Shapley
attribution, survey scoring, and deterministic synthetic sessions — usable
as a library, through scikit-learn style estimators, or from the CLI.
"""

__version__ = "0.1.0"

from .signal_core import (
    Channel,
    Recording,
    butterworth_lowpass,
    derivative,
    minmax_normalize,
    savitzky_golay,
)
from .blink_detect import (
    PeakCandidate,
    PeakSegment,
    SearchParams,
    blink_prefilter,
    detect_and_segment,
    detect_peaks,
    find_nearby_minimum,
    segment_peak,
)
from .eog_features import (
    AMPLITUDE_INDEPENDENT_NAMES,
    EOG_FEATURE_NAMES,
    BlinkFeatures,
    TentGeometry,
    extract_eog_features,
    histogram_entropy,
    tent_geometry,
)
from .eda_features import (
    EDA_FEATURE_NAMES,
    EdaFeatures,
    EdaWindow,
    dfa_alpha,
    extract_eda_features,
    higuchi_fd,
    hjorth,
    katz_fd,
    permutation_entropy,
    petrosian_fd,
    scr_count,
    spectral_entropy,
    tonic_phasic_split,
    window_series,
)
from .cull_search import (
    CullConfig,
    EvalReport,
    FeatureRow,
    FeatureTable,
    apply_bounds,
    bfs_search,
    combination_sweep,
    concat_tables,
    evaluate,
    individual_search,
    individual_search_all,
)
from .attribution import (
    LinearModel,
    ShapleyReport,
    background_mean,
    fit_ridge,
    mean_abs_shap,
    shapley_exact,
)
from .surveys import (
    PANAS_ITEMS,
    STAI_ROSTERS,
    SurveyResponse,
    score_panas,
    score_stai_state,
)
from .synth import (
    GroundTruthPeak,
    SynthEvent,
    SynthSpec,
    Xorshift64Star,
    make_blink_spec,
    make_eda_spec,
    make_wire_spec,
    synth_blink_session,
    synth_eda_session,
    synth_wire_session,
)
from .estimators import CullBoundClassifier, RidgeRegressor
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
