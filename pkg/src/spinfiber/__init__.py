"""Spinor representation of GL(4,R) over a fiber space of diagonal metrics."""
from .base_metric import MINKOWSKI, BaseShift, DiagonalMetric, congruence, metric_from_entries, shift
from .clifford import deformed_gammas, dirac_adjoint, norm_density, sigma, standard_gammas
from .decompose import IsometryFactorization, exponential_parts, factorize
from .errors import *  # noqa: F401,F403
from .fiber import BaseGrid, FiberSpinorField, MotionSpec, aggregate, total_norm, transport
from .grid import ChartGrid
from .mat4 import eig_sym4, mat_exp, mat_log
from .spinlift import IsometryGenerator, lift_generator, lift_isometry, spin_exp

__version__ = "0.1.0"
