"""Rate outage analysis of small-cell downlinks with OFDMA and SDMA.

The package computes the user-rate distribution of a typical UE in a
Poisson small-cell network whose access points have finite antennas and
split bandwidth into equal subchannels. Two access schemes are modelled:
plain OFDMA with random round-based subchannel assignment (``scheme1``)
and SDMA groups of up to ``m_max`` UEs sharing a subchannel (``scheme2``).
"""

__version__ = "0.1.0"

from .analytic import (ChannelParams, CdfCurve, interference_laplace, per_channel_rate,
                       rate_cdf, rate_cdf_conditional, rate_cdf_curve, rho, sir_cdf,
                       sir_cdf_conditional, sir_cdf_curve)
from .config import DEFAULT_SEED, GridSpec, SystemConfig, db_to_linear, linear_to_db
from .estimators import AnalyticRateModel, SimulatedRateModel, SubchannelSelector
from .exceptions import (DegenerateRealization, EmptySamples, EnumerationTooLarge,
                         InvalidParameter, QuadratureNotConverged, SmallCellError,
                         TailMassTooLarge)
from .load import LoadPmf, cell_load_pmf, pmf_moment, tagged_cell_extra_load_pmf
from .optimize import OptimizationResult, optimal_subchannels, outage_curve, outage_frontier
from .schemes import (AccessProfile, CellAllocation, Scheme, access_profile, allocate,
                      allocate_scheme1, allocate_scheme2, degenerate_profile,
                      interferer_mtilde_pmf, subchannel_activity_probability,
                      typical_joint_pmf)
from .simulate import (CampaignResult, SimWindow, empirical_cdf, run_campaign,
                       sample_network, simulate_records, wilson_interval)

__all__ = [name for name in dir() if not name.startswith("_")]
