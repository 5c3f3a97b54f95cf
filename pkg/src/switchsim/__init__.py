"""Quantum-switch channels, switch-induced memory and non-Markovianity measures.

Submodules
----------
qlinalg   small dense linear algebra (trace distance, partial trace, Choi states)
channels  time-parametrised Pauli, depolarising and Weyl channel families
switch    the two-use quantum switch, ideal and noisy
lindblad  time-local generator reconstruction and decay rates
measures  information loss, QSM, time averages, BLP and RHP measures
cli       the ``switchsim`` command-line program
"""

from . import channels, lindblad, measures, qlinalg, switch
from .channels import GeneralizedPauliSpec, KrausFamily, PauliRates
from .errors import (ContractViolation, ConvergenceError, DegenerateBranchError, DomainError,
                     InversionError, RootError, SingularExpressionError)
from .lindblad import LindbladReport, lindblad_report
from .measures import NonMarkovReport, QsiRecord, nonmarkov_report
from .switch import ControlSpec, MeasurementSpec, SwitchConfig, SwitchedFamily, SwitchOutcome

__version__ = "0.1.0"
