"""Discretized 1D magnetic particle imaging forward operator.

Assembly of the operator from its factors, singular-value analysis,
forward simulation and regularized reconstruction.
"""

from .assembly import (build_q_chebt, build_q_conv, build_q_emb, build_q_fft, build_q_time,
                       build_restriction, build_s_conv, build_s_freq, build_s_time)
from .config import ConfigError, ExperimentConfig, load_config, parse_config, serialize_config
from .grids import SpaceGrid, TimeGrid
from .imaging import (Phantom, Signal, add_noise, forward, make_phantom, reconstruct_tikhonov,
                      reconstruct_tsvd, rel_error)
from .operator import OperatorMatrix, TagMismatchError, compose
from .physics import PhysicalParams, kernel_fourier, kernel_mg_deriv, langevin, langevin_deriv
from .spectral import (SpectrumReport, convergence_study, elliptic_k, fit_decay_rate,
                       operator_spectrum, singular_values, widom_rate)
from .trajectory import TrajectoryKind, gamma, gamma_g, gamma_g_inv

__version__ = "0.1.0"
