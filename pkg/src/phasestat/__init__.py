"""Phase-space symbols of few-particle density matrices and checks of their
behaviour under particle exchange."""

from .core import (DimensionError, DomainError, Field2D, GridSpec, PhasePoint, Report,
                   TruncationError, TruncationWarning, integrate, rotate_pm, symplectic_fourier)
from .states import (DensityMatrix, ExchangePair, LazyKernel, Wavefunction, apply_exchange,
                     coherent_state, coherent_superposition, mixture, projector, spectrum, trace,
                     trace_product)
from .husimi import husimi_grid, husimi_integral, husimi_two_point, phase_grid
from .wigner import WignerField, minus_block, wigner_rotated, wminus
from .toeplitz import GaussianSymbol, symbol_exchange, toeplitz_kernel, toeplitz_offdiag_quantize, \
    toeplitz_quantize
from .statistics import check_state, symmetrize, trace_sum_rule
from .symplectic import LinearPhaseMap, builtin, classify, pm_rotation, substitute

__version__ = "0.1.0"
