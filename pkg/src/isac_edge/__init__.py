"""Beamforming and time allocation for ISAC-accelerated edge learning."""
from .beamform import (BeamformerPair, BeamformOutcome, BeamStatus, grid_oracle,
                       solve_beamforming, zf_oracle)
from .channels import ChannelSet, SceneGeometry, build_channels, steering_vector
from .errors import (DimensionError, DomainError, InfeasibleTaskError, IsacError,
                     OracleNotApplicable, ScenarioError)
from .model import (SampleBudget, SystemConfig, classification_error, comm_sinr,
                    fit_error_model, quality_gate, rate, sample_budget, sensing_sinr)
from .pipeline import (PhaseSolution, RunReport, compare, isac_gain_analytic, run_conventional,
                       run_isac, sweep)
from .scenario import Scenario, load_scenario
from .timealloc import RateProfile, TimeAllocation, solve_time_allocation, tau_of_mu

__version__ = "0.1.0"
