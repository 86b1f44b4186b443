"""Exact computations with approximate subrings: set calculus over finite and
discrete rings, translate covers, thickness, escape norms, nilpotency
certificates, word-ball growth and cut-and-project model sets.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .approx import (
    ApproxReport,
    BoundCheck,
    DichotomyReport,
    ThicknessResult,
    approx_constant,
    bound_suite,
    commensurability,
    dichotomy_report,
    thickness,
)
from .cutproject import (
    ModelSetSpec,
    PointCloud,
    QuadFieldData,
    Window,
    algebra_model_set,
    approx_check_cloud,
    cloud_stats,
    model_set,
    pisot_window,
    span_ideal,
    window_commensurability,
)
from .errors import (
    ApproxRingError,
    BudgetExceeded,
    CloudError,
    ConfigError,
    InvalidCertificate,
    NotSymmetricError,
    RingSpecError,
    SubstructureError,
)
from .escape import escape_norm, norm_table, strong_norm_check
from .growth import fit_degree, gromov_report, growth_series, scale_finder
from .ring import Element, Integers, MatrixRing, QuadField, ZMod, arith, make_ring
from .setops import (
    CoverCertificate,
    ElementSet,
    alg_set,
    cover_number,
    interval,
    iterate_xn,
    productset,
    random_symmetric,
    sumset,
    word_ball,
)
from .structure import (
    NilpotentCertificate,
    generated_subring,
    nilpotency_class,
    nilpotent_base,
    nilpotent_certificate,
)

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
