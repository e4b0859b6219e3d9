"""Contexts, modalities and transition matrices of finite-dimensional quantum mechanics."""

from .contexts import (
    Context,
    ContextChange,
    ContextRegistry,
    Modality,
    Observable,
    TransitionMatrix,
    context_change,
    context_from_observable,
    context_noncommutativity,
    csco_context,
    random_context,
    standard_context,
    transformed_context,
    transition_matrix,
)
from .exceptions import ModalQMError
from .fitting import (
    FitConfig,
    FitResult,
    OrthostochasticFit,
    UnistochasticFit,
    orthostochastic_fit,
    unistochastic_fit,
)
from .groups import (
    PhysicalScale,
    cyclic_translation_rep,
    physical_observable,
    rotation_compose,
    rotation_unitary,
    spin_context,
    spin_matrices,
)
from .linalg import hermitian_eigendecomposition, unitary_from_generator
from .measurement import SystemState, measure, measure_chain, run_sequence
from .stochastic import birkhoff_sample, is_doubly_stochastic

__version__ = "0.1.0"
