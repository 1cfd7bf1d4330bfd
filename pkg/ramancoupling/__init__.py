"""ramancoupling - microwave-induced coupling of a driven transmon and a resonator

.. currentmodule:: ramancoupling

.. autosummary::

   SystemParams
   DriveParams
   diagonalize
   dressed_state
   effective_coupling_pt
   exact_splitting
   stark_shift_resolvent
   calibrate_drive_power
   stark_parallel_transport
   simulate_pi_pulse
   rabi_eigenexpansion
   analytic_fidelity
   fit_response

"""
# Author: ramancoupling developers
# Created: October 2026

__autodoc__ = ['model', 'spectral', 'resolvent', 'stark', 'dynamics', 'spectroscopy',
               'commands']

__all__ = ['SystemParams', 'DriveParams', 'BasisLabel', 'SpectralResult',
           'build_hamiltonian', 'build_hjc', 'diagonalize', 'label_dressed_states',
           'dressed_state', 'effective_coupling_pt', 'lambda_system_coupling',
           'exact_splitting', 'stark_shift_resolvent', 'calibrate_drive_power',
           'StarkSolution', 'initial_drive_frequency', 'stark_parallel_transport',
           'PulseShape', 'pulse_pi', 'evolve', 'simulate_pi_pulse',
           'rabi_eigenexpansion', 'analytic_fidelity', 'ResponseModel',
           'TransmissionTrace', 'response', 'find_split_peaks', 'fit_response',
           'RamanCouplingError', '__version__']

from .errors import RamanCouplingError
from .model import SystemParams, DriveParams, BasisLabel, build_hamiltonian, build_hjc
from .spectral import (SpectralResult, diagonalize, label_dressed_states, dressed_state,
                       effective_coupling_pt, lambda_system_coupling, exact_splitting)
from .resolvent import stark_shift_resolvent, calibrate_drive_power
from .stark import StarkSolution, initial_drive_frequency, stark_parallel_transport
from .dynamics import (PulseShape, pulse_pi, evolve, simulate_pi_pulse, rabi_eigenexpansion,
                       analytic_fidelity)
from .spectroscopy import ResponseModel, TransmissionTrace, response, find_split_peaks, fit_response
from .version import version as __version__
