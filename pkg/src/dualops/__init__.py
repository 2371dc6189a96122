"""dualops: adjoints, compatibility conditions and torsion tests for
matrices of linear differential operators over Q(params)(x1..xn).

The package is organized in dependency order:

  field    exact scalar arithmetic (multivariate rational functions
           with parameters) and multi-index bookkeeping
  linalg   fraction-free elimination over those scalars
  ore      operators d_mu with rational-function coefficients, operator
           matrices, formal adjoints, lclm, affine coordinate changes
  janet    jet prolongation, compatibility conditions, row-module
           membership, Spencer symbols and delta cohomology
  duality  the five-step double-duality torsion test and parametrization
  geom     the operator zoo (Killing, Riemann, Ricci, Einstein, Cauchy,
           Airy, Beltrami, control fixtures) plus the fixture registry
  sysdsl   the .sys text format (parse / print round trip)
  cli      the dualops command line driver
"""

from .field import (
    FieldContext,
    MultiIndex,
    RatFunc,
    IndexOutOfRange,
    PoleAtPoint,
    ZeroDenominator,
    jet_dim,
    sym_dim,
)
from .ore import (
    DimensionMismatch,
    OpMatrix,
    OreOperator,
    SingularMap,
    adjoint,
    adjoint_matrix,
    lclm,
    rebase,
    transform_affine,
)
from .janet import (
    BoundExceeded,
    CCResult,
    JetMatrix,
    SpencerSystem,
    cc,
    delta_cohomology_dims,
    delta_map,
    membership,
    pp_reduce,
    rank_D,
    spencerize,
    symbol_dims,
    symbol_of,
)
from .duality import (
    DualityReport,
    HasTorsion,
    Inconclusive,
    TorsionElement,
    default_search_order,
    five_step_test,
    parametrize,
    self_adjoint_check,
    weighted_adjoint,
)
from . import geom
from . import sysdsl

__all__ = [
    "FieldContext",
    "MultiIndex",
    "RatFunc",
    "IndexOutOfRange",
    "PoleAtPoint",
    "ZeroDenominator",
    "jet_dim",
    "sym_dim",
    "DimensionMismatch",
    "OpMatrix",
    "OreOperator",
    "SingularMap",
    "adjoint",
    "adjoint_matrix",
    "lclm",
    "rebase",
    "transform_affine",
    "BoundExceeded",
    "CCResult",
    "JetMatrix",
    "SpencerSystem",
    "cc",
    "delta_cohomology_dims",
    "delta_map",
    "membership",
    "pp_reduce",
    "rank_D",
    "spencerize",
    "symbol_dims",
    "symbol_of",
    "DualityReport",
    "HasTorsion",
    "Inconclusive",
    "TorsionElement",
    "default_search_order",
    "five_step_test",
    "parametrize",
    "self_adjoint_check",
    "weighted_adjoint",
    "geom",
    "sysdsl",
]

__version__ = "0.1.0"
