"""Instantaneous-phase estimators for the calibrating signal."""
from .base import DegenerateSignalError, DivergenceError, PhaseEstimate
from .ekf import EkfParams, ekf_estimate
from .envelope import envelope_equalize, envelope_phase, equalized_phase
from .fft import OpCounter, split_radix_fft
from .hilbert import analytic_signal, hilbert_phase
from .init import coarse_phase_poly, ekf_initial_cov, ekf_initial_state, ukf_initial_params
from .ipdft import IpdftParams, block_estimates, ipdft_estimate
from .opcount import OpCount, count_ops, ipdft_block_ops
from .ukf import UkfParams, ukf_estimate
from .windows import rvci_coefficients, window_gen

__all__ = [
    "DegenerateSignalError", "DivergenceError", "PhaseEstimate",
    "EkfParams", "ekf_estimate", "envelope_equalize", "envelope_phase", "equalized_phase",
    "OpCounter", "split_radix_fft", "analytic_signal", "hilbert_phase",
    "coarse_phase_poly", "ekf_initial_cov", "ekf_initial_state", "ukf_initial_params",
    "IpdftParams", "block_estimates", "ipdft_estimate",
    "OpCount", "count_ops", "ipdft_block_ops", "UkfParams", "ukf_estimate",
    "rvci_coefficients", "window_gen",
]
