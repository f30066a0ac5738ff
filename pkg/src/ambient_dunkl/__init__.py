"""Dunkl operators on the ambient space R^{n+1,1} and the conformal Dunkl-Laplace operator on S^n."""
from .ambient import BilinearForm, null_lift, pair, to_cone_coords, from_cone_coords
from .chartcalc import Density, ChartExpr, density_to_ambient, derivative, evaluate, parse_expr
from .conformal import (
    ConformalOperatorSpec,
    ambient_route,
    chart_operator,
    classical_dunkl_chart,
    cross_validate,
    extension_independence_residual,
    higher_power,
)
from .dunkl import DunklContext, dunkl, dunkl_laplacian_direct, dunkl_laplacian_sum, sl2_commutators
from .polyalg import MultiPoly
from .rootsys import (
    MultiplicityFunction,
    Root,
    RootSystem,
    build_B,
    builtin_system,
    chart_reflection,
    generate_group,
)

__version__ = "0.1.0"

__all__ = [
    "BilinearForm",
    "null_lift",
    "pair",
    "to_cone_coords",
    "from_cone_coords",
    "Density",
    "ChartExpr",
    "density_to_ambient",
    "derivative",
    "evaluate",
    "parse_expr",
    "ConformalOperatorSpec",
    "ambient_route",
    "chart_operator",
    "classical_dunkl_chart",
    "cross_validate",
    "extension_independence_residual",
    "higher_power",
    "DunklContext",
    "dunkl",
    "dunkl_laplacian_direct",
    "dunkl_laplacian_sum",
    "sl2_commutators",
    "MultiPoly",
    "MultiplicityFunction",
    "Root",
    "RootSystem",
    "build_B",
    "builtin_system",
    "chart_reflection",
    "generate_group",
]
