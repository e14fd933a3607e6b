"""Multi-source answer aggregation with estimated source reliability."""

import os
from pathlib import Path

from ._core import (  # noqa: F401
    Answer,
    PriorSpec,
    ReliagError,
    SourceProfile,
    WeightVector,
    accuracy,
    accuracy_containment,
    build_matrix,
    cluster,
    correlation,
    estimate_reliability,
    filter_response,
    kappa_rrss,
    list_noise_presets,
    majority_vote,
    noise_preset_dir,
    run_experiment,
    set_noise_preset_dir,
    tool_version,
    weighted_majority_vote,
)

__version__ = "0.1.0"


def _locate_presets() -> None:
    if os.environ.get("RELIAG_NOISE_DIR"):
        return
    packaged = Path(__file__).parent / "data" / "noise_presets"
    if packaged.is_dir():
        set_noise_preset_dir(str(packaged))


_locate_presets()
