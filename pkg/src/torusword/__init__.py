"""torusword: coded translations on tori and their complexity functions.

Substitutive words and Rauzy fractal clouds, piecewise translations on
fundamental domains with orbit codings, Rauzy graphs with their cycle
spaces, and a verification battery for the complexity bounds kn+1 and the
equality cases kn+1 and n^2+n+1.
"""

from .kernels import IMPLEMENTATION as KERNEL_IMPLEMENTATION
from .words import (
    Alphabet,
    ComplexityReport,
    FiniteWord,
    LazyWord,
    StabilizationPolicy,
    complexity,
    factor_counts,
    factors,
)
from .substitution import (
    FractalCloud,
    PerronData,
    Substitution,
    abelianization,
    broken_line,
    fixed_point,
    fractal_cloud,
    k_bonacci,
    perron,
)
from .torus import (
    PiecewiseTranslation,
    MinimalityVerdict,
    circle_rotation,
    coding,
    hexagon_example,
    hexagon_translation,
    minimality_check,
    orbit,
    verify_measure_identities,
)
from .graphs import (
    RauzyGraph,
    build_rauzy_graph,
    conservation_defect,
    cycle_space,
    cycle_vector,
    decompose_in_cycles,
    euler_characteristic_check,
    four_vertex_example,
)
from .battery import Battery, VerificationReport, run_battery

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Battery",
    "ComplexityReport",
    "FiniteWord",
    "FractalCloud",
    "KERNEL_IMPLEMENTATION",
    "LazyWord",
    "MinimalityVerdict",
    "PerronData",
    "PiecewiseTranslation",
    "RauzyGraph",
    "StabilizationPolicy",
    "Substitution",
    "VerificationReport",
    "abelianization",
    "broken_line",
    "build_rauzy_graph",
    "circle_rotation",
    "coding",
    "complexity",
    "conservation_defect",
    "cycle_space",
    "cycle_vector",
    "decompose_in_cycles",
    "euler_characteristic_check",
    "factor_counts",
    "factors",
    "fixed_point",
    "four_vertex_example",
    "fractal_cloud",
    "hexagon_example",
    "hexagon_translation",
    "k_bonacci",
    "minimality_check",
    "orbit",
    "perron",
    "run_battery",
    "verify_measure_identities",
]
