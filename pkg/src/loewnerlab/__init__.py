"""Numerical laboratory for the chordal Loewner equation."""
from . import errors
from ._kernel import BACKEND
from .drivers import Driver
from .examples import circle_example, example1_driver, marshall_curve, marshall_driver
from .expansion import (ExpansionReport, base_coefficients, build_comparison,
                        comparison_expansion, evolve_slit_map)
from .loewner_ode import (flow, solve_tip, solve_tip_with_variation, tip_and_variation,
                          tip_limit)
from .regularity import RegularityReport, curve_regularity, holder_exponent, zygmund_seminorm
from .specs import parse_driver
from .trace import Trace, curve_derivatives, first_derivative, second_derivative, trace_curve

__version__ = "0.1.0"
