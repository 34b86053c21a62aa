"""Coherent vs. LOCC (measurement-and-feedback) oscillator-qubit coupling: revivals, separability, rates."""
from .coherent import CoherentParams, entangled_midpoint_state, propagator, protocol_signal_numeric, signal_ground, signal_thermal
from .kraus import KrausSet, apply_channel, channel_distance, compose, kraus_from_generator, mix_kraus, product_form_pair, separability_defect
from .lindblad import LindbladGenerator, LoccParams, build_locc_generator, evolve, integrate, revival_curve
from .noise_budget import Scenario, asymmetric_rate, blackhole_comparison, coupling_g, symmetric_split
from .operators import (
    DensityState,
    EntanglementReport,
    OperatorMatrix,
    coherent_state,
    displacement,
    fock_operators,
    negativity,
    partial_trace,
    partial_transpose,
    tensor,
    thermal_state,
)
from .stochastic import NoiseIncrement, TrajectoryRecord, ensemble_average, simulate_trajectory, sme_step, tltm_kraus_step

__version__ = "0.1.0"
