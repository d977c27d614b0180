"""Near-field XL-MIMO channel simulator and analysis toolkit."""

from .beamfocus import (
    FocusSetup,
    GainMode,
    array_gain,
    array_gain_closed_form,
    focusing_phases,
    make_focus_setup,
    paraxial_parameter,
    snr_at,
    spacing_threshold,
)
from .channel import (
    ChannelMatrix,
    SystemGeometry,
    build_channel,
    channel_to_csv,
    greens,
    received_field,
)
from .experiments import SweepRecord, SweepSpec, eigen_profile, run_sweep, validate_closed_form
from .geometry import PlanarArray, build_upa, relative_coordinate
from .spectrum import (
    EdofReport,
    EigenSpectrum,
    capacity,
    count_dof,
    edof_exact,
    edof_fringes,
    edof_report,
    edof_trace,
    eigen_spectrum,
    plane_area,
)

__all__ = [
    "ChannelMatrix",
    "EdofReport",
    "EigenSpectrum",
    "FocusSetup",
    "GainMode",
    "PlanarArray",
    "SweepRecord",
    "SweepSpec",
    "SystemGeometry",
    "array_gain",
    "array_gain_closed_form",
    "build_channel",
    "build_upa",
    "capacity",
    "channel_to_csv",
    "count_dof",
    "edof_exact",
    "edof_fringes",
    "edof_report",
    "edof_trace",
    "eigen_profile",
    "eigen_spectrum",
    "focusing_phases",
    "greens",
    "make_focus_setup",
    "paraxial_parameter",
    "plane_area",
    "received_field",
    "relative_coordinate",
    "run_sweep",
    "snr_at",
    "spacing_threshold",
    "validate_closed_form",
]

__version__ = "0.1.0"
