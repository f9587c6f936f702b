"""GP regression with pooled priors.

A pool of GP priors combined by linear opinion pooling yields a process
whose finite marginals are Gaussian mixtures. This package implements the
closed-form posterior of that model (``mgp.exact_mgp``), a sparse
variational variant with a Dirichlet prior over the pool weights
(``mgp.svmgp``), the kernel and mixture building blocks, scikit-learn
style estimators, and an experiment harness with a CLI (``mgp``).
"""

from .errors import NotFittedError, NumericalDegeneracyError
from .estimators import ExactMGPRegressor, SVMGPRegressor
from .exact_mgp import MGPComponent, MGPPrior, TrainConfig
from .gaussmix import Gaussian, GaussianMixture
from .kernels import (
    ARDSEKernel,
    ConstantMean,
    GramOptions,
    LinearKernel,
    LinearMean,
    PeriodicKernel,
    ZeroMean,
)
from .svmgp import SVMGPComponent, SVMGPModel, SVMGPTrainConfig

__version__ = "0.1.0"

__all__ = [
    "ARDSEKernel",
    "ConstantMean",
    "ExactMGPRegressor",
    "Gaussian",
    "GaussianMixture",
    "GramOptions",
    "LinearKernel",
    "LinearMean",
    "MGPComponent",
    "MGPPrior",
    "NotFittedError",
    "NumericalDegeneracyError",
    "PeriodicKernel",
    "SVMGPComponent",
    "SVMGPModel",
    "SVMGPRegressor",
    "SVMGPTrainConfig",
    "TrainConfig",
    "ZeroMean",
    "__version__",
]
