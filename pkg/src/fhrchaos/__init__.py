"""Coarse-grained Markov analysis of chaotic bursting in the FitzHugh-Rinzel model."""

from .models import DelNegroParams, RinzelParams, delnegro_rhs, rinzel_rhs
from .integrate import IntegratorConfig, Trajectory, attractor_sample, integrate
from .sections import (DEFAULT_SECTION, PlaneSection, bifurcation_scan,
                       classify_periodicity, detect_crossings, return_map)
from .partition import (PartitionSpec, SymbolSequence, builtin_partition,
                        load_partition, merge_regions, save_partition,
                        split_region, symbolize)
from .markov import (MarkovChain, TransitionCounts, entropy_rate,
                     estimate_chain, simulate_walk, stationary,
                     subshift_entropy)
from .complexity import (LyapunovConfig, LyapunovResult, binarize_walk,
                         lyapunov_spectrum, lz76,
                         topological_entropy_estimate)
from .refine import (EntropyReport, entropy_gap_scan, make_entropy_report,
                     markov_order_test, suggest_refinement,
                     validate_refinement)
from .sweep import SweepConfig, SweepRow, compare_report, run_sweep

__version__ = "0.1.0"

__all__ = [
    "DelNegroParams",
    "RinzelParams",
    "delnegro_rhs",
    "rinzel_rhs",
    "IntegratorConfig",
    "Trajectory",
    "attractor_sample",
    "integrate",
    "PlaneSection",
    "DEFAULT_SECTION",
    "detect_crossings",
    "return_map",
    "bifurcation_scan",
    "classify_periodicity",
    "PartitionSpec",
    "SymbolSequence",
    "builtin_partition",
    "load_partition",
    "save_partition",
    "symbolize",
    "merge_regions",
    "split_region",
    "TransitionCounts",
    "MarkovChain",
    "estimate_chain",
    "stationary",
    "entropy_rate",
    "subshift_entropy",
    "simulate_walk",
    "LyapunovConfig",
    "LyapunovResult",
    "lyapunov_spectrum",
    "topological_entropy_estimate",
    "lz76",
    "binarize_walk",
    "EntropyReport",
    "make_entropy_report",
    "entropy_gap_scan",
    "markov_order_test",
    "suggest_refinement",
    "validate_refinement",
    "SweepConfig",
    "SweepRow",
    "run_sweep",
    "compare_report",
    "__version__",
]
