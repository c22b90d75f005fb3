"""Error suppression for four-component cat codes.

Closed-form channels for photon subtraction, loss and teleamplification, a
brute-force Fock-space circuit simulator to check them, and a CPTP-constrained
optimizer for worst-case recovery fidelity.
"""

from .catstates import CatBasisKind, LogicalBasis, encode, basis_state
from .channels import (
    EffectiveParams,
    HeraldingSet,
    PipelineParams,
    effective_params,
    loss_mixture,
    min_success_probability,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    CutoffError,
    DomainError,
    NoRealRootError,
    SingularNormalizerError,
)
from .optimizer import AscentConfig, optimize
from .recovery import canonical_recovery, pipeline_noise, worst_case_fidelity

__version__ = "0.1.0"
