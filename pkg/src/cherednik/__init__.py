"""Cherednik workbench.

Exact Dunkl operators and rational Cherednik algebra representations,
the Macdonald-Mehta integral, Calogero-Moser flows, Hecke algebras and
KZ monodromy, cross-checked against each other.

Example:
    >>> from cherednik import DunklContext, build_group, commutativity_check
    >>> ctx = DunklContext.build(build_group("B2"))
    >>> commutativity_check(ctx, 3).passed
    True
"""

from importlib.metadata import PackageNotFoundError, version

from .calogero import (
    CMPoint,
    CoordChart,
    Trajectory,
    necklace_bracket_check,
    trajectories_ode,
    trajectories_spectral,
    xi_map,
)
from .dunkl import (
    DunklContext,
    commutativity_check,
    commutator_defect,
    dunkl_apply,
    sigma_vanish_check,
)
from .exact import CoordinateRing, MPoly, RationalFn
from .exceptions import (
    CherednikError,
    CollisionDetected,
    ConfigError,
    IdentityViolation,
    MoveCapExceeded,
    UnsupportedType,
)
from .groups import CyclicGroup, ReflectionGroup, build_group, degrees, poincare_polynomial
from .hecke import DeformedCoxeter, HeckeAlgebra, HeckeElement, hecke_algebra_typeA
from .kz import KZConnection, kz_transport, monodromy_eigencheck
from .mehta import bk_closed, bk_exact_via_form, mm_report
from .models import CheckReport, JobConfig, JobResult, Settings
from .runner import SweepRunner
from .support import finite_dim_criterion, support_report
from .utils import load_settings
from .verma import contravariant_gram, rank1_spectrum, singular_vectors, typeA_quotient

try:
    __version__ = version("cherednik-wb")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"
__all__ = [
    "CMPoint",
    "CheckReport",
    "CherednikError",
    "CollisionDetected",
    "ConfigError",
    "CoordChart",
    "CoordinateRing",
    "CyclicGroup",
    "DeformedCoxeter",
    "DunklContext",
    "HeckeAlgebra",
    "HeckeElement",
    "IdentityViolation",
    "JobConfig",
    "JobResult",
    "KZConnection",
    "MPoly",
    "MoveCapExceeded",
    "RationalFn",
    "ReflectionGroup",
    "Settings",
    "SweepRunner",
    "Trajectory",
    "UnsupportedType",
    "bk_closed",
    "bk_exact_via_form",
    "build_group",
    "commutativity_check",
    "commutator_defect",
    "contravariant_gram",
    "degrees",
    "dunkl_apply",
    "finite_dim_criterion",
    "hecke_algebra_typeA",
    "kz_transport",
    "load_settings",
    "mm_report",
    "monodromy_eigencheck",
    "necklace_bracket_check",
    "poincare_polynomial",
    "rank1_spectrum",
    "sigma_vanish_check",
    "singular_vectors",
    "support_report",
    "trajectories_ode",
    "trajectories_spectral",
    "typeA_quotient",
    "xi_map",
]
