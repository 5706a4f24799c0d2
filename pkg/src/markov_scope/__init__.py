"""Markovianity (CP-divisibility) and fidelity of noisy qubit dephasing maps."""
from ._accel import USE_NUMBA
from .channels import (
    ChannelSpec,
    Constant,
    ExpDecay,
    NoiseAngles,
    SinSq,
    Tanh,
    WeightedKrausMap,
    apply_map,
    build_map,
    integrated_rate,
    multi_channel_probabilities,
    perturbed_pauli,
    single_dephasing_map,
)
from .divisibility import (
    DivisibilityReport,
    TimeGrid,
    Verdict,
    check_cp_divisibility,
    check_semigroup,
    eigenvalue_surface,
)
from .fidelity import bures_distance, fidelity_scan_p_alpha, fidelity_vs_time, state_fidelity
from .transfer import (
    choi_from_kraus_direct,
    choi_from_transfer,
    propagator_transfer,
    transfer_from_map,
)

__version__ = "0.1.0"
