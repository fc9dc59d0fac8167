"""Numerical analytic continuation: transport, monodromy, growth, zero counts."""

from .paths import Arc, Line, PathSpec, Triangle, arc_between, circle, lasso, polyline
from .numeric import CompiledForm, NumericFuchsian, RestrictedSystem, as_numeric
from .integrator import IntegrationError, IntegrationResult, integrate, trace_integral
from .monodromy import MonodromyResult, SpiderResult, monodromy, monodromy_all, root_of_unity_test, spider
from .growth import GrowthEstimate, growth_exponent
from .zeros import BoundaryError, ZeroCount, count_zeros, count_zeros_many
from .parallel import pmap

__all__ = [
    "Arc", "Line", "PathSpec", "Triangle", "arc_between", "circle", "lasso", "polyline",
    "CompiledForm", "NumericFuchsian", "RestrictedSystem", "as_numeric",
    "IntegrationError", "IntegrationResult", "integrate", "trace_integral",
    "MonodromyResult", "SpiderResult", "monodromy", "monodromy_all", "root_of_unity_test", "spider",
    "GrowthEstimate", "growth_exponent",
    "BoundaryError", "ZeroCount", "count_zeros", "count_zeros_many",
    "pmap",
]
