"""Stochastic phased-array KPIs for single-cell massive MIMO uplinks.

The uplink SINR of a UE under reference-array channel normalization depends
only on the transmit power, the instantaneous element gain (IEG) and the
beamforming-channel correlation (BCC). This package simulates the
statistics of both for line-of-sight channels, several array layouts and
element types, and zero-forcing combining with optional user dropping.
"""

__version__ = "0.1.0"

from .channel import AoaSet, ChannelSet, build_channels, draw_aoas, manifold, normalize, steering_vector
from .coupling import build_mcm, mutual_impedance, self_impedance
from .elements import ElementKind, ElementModel, make_element, normalize_gamma, pattern
from .errors import (
    ArrayKpiError,
    ConfigurationError,
    DegenerateChannelError,
    DomainError,
    NumericError,
    SingularChannelError,
    ValidityError,
)
from .geometry import ArrayLayout, LayoutKind, load_layout, make_nula_tchebyshev, make_ula
from .montecarlo import (
    EmpiricalCdf,
    KpiDataset,
    ScenarioConfig,
    empirical_cdf,
    ergodic_rates,
    run_scenario,
)
from .config import load_config_file, parse_config, serialize_config
from .results import make_manifest, write_results, write_sweep
from .scheduler import drop_users
from .sweep import ARRAYS, run_sweep
from .zf import bcc, gscc, ieg, rate, sinr_decomposed, sinr_general, sinr_zf, zf_combiner
from . import zf  # noqa: E402
