"""Decision procedures for ultrametric-preserving transforms of finite spaces."""

__version__ = "0.1.0"

from .decomposition import DecompositionResult, decompose, zero_gap_radius
from .errors import InputError, NoWitnessError, PreconditionError, UndecidedError, UltrapresError
from .exact import Enclosure, parse_value, power
from .families import (
    FunctionFamily,
    counterexample_space,
    find_separator,
    is_k_separating_on,
    power_separator_exponent,
    ultrametric_by_family,
)
from .functions import (
    FunctionClassification,
    PiecewiseAffine,
    Power,
    affine,
    classify_function,
    evaluate,
    identity,
    is_amenable,
    is_doubling,
    is_increasing,
    make_cap,
    make_fab,
    make_power,
    make_threshold,
    running_max,
    step_function,
)
from .generators import GenSpec, gen_function, gen_metric, gen_pseudoultrametric, gen_ultrametric
from .spaces import (
    AxiomReport,
    Dissimilarity,
    check_triangle_perimeter,
    classify_space,
    worst_ultrametric_violation,
)
from .theorems import (
    WitnessPackage,
    apply,
    dual_witness,
    min_falsifying_exponent,
    probe_fab,
    probe_snowflake,
    witness_not_pseudoultrametric_preserving,
    witness_not_semimetric_preserving,
    witness_not_ultrametric_metric_preserving,
    witness_not_ultrametric_preserving,
)

__all__ = [
    "AxiomReport",
    "DecompositionResult",
    "Dissimilarity",
    "Enclosure",
    "FunctionClassification",
    "FunctionFamily",
    "GenSpec",
    "InputError",
    "NoWitnessError",
    "PiecewiseAffine",
    "Power",
    "PreconditionError",
    "UltrapresError",
    "UndecidedError",
    "WitnessPackage",
    "affine",
    "apply",
    "check_triangle_perimeter",
    "classify_function",
    "classify_space",
    "counterexample_space",
    "decompose",
    "dual_witness",
    "evaluate",
    "find_separator",
    "gen_function",
    "gen_metric",
    "gen_pseudoultrametric",
    "gen_ultrametric",
    "identity",
    "is_amenable",
    "is_doubling",
    "is_increasing",
    "is_k_separating_on",
    "make_cap",
    "make_fab",
    "make_power",
    "make_threshold",
    "min_falsifying_exponent",
    "parse_value",
    "power",
    "power_separator_exponent",
    "probe_fab",
    "probe_snowflake",
    "running_max",
    "step_function",
    "ultrametric_by_family",
    "witness_not_pseudoultrametric_preserving",
    "witness_not_semimetric_preserving",
    "witness_not_ultrametric_metric_preserving",
    "witness_not_ultrametric_preserving",
    "worst_ultrametric_violation",
    "zero_gap_radius",
]
