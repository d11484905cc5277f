"""Simulator for a two-interferometer annihilation experiment and its
local-hidden-variable analysis."""
from importlib import resources

from .circuit import (
    AnnihilationRule,
    BeamSplitter,
    PhaseSettings,
    Scheme,
    SchemeError,
    WingCircuit,
    build_scheme_a,
    build_scheme_b,
    splitter_coefficients,
    validate,
)
from .dsl import DSLError, ParseDiagnostic, SourceSpan, parse, parse_with_diagnostics, render
from .evolution import (
    BellKind,
    OutcomeDistribution,
    apply_annihilation,
    apply_stage1,
    apply_stage2,
    apply_stage3,
    bell_overlap,
    dense_oracle,
    evolve,
    outcome_distribution,
    postselect_survivors,
)
from .lhv import (
    Behavior,
    DeterministicStrategy,
    Feasible,
    Infeasible,
    LocalOutcome,
    behavior_from_quantum,
    contradiction_fraction,
    enumerate_strategies,
    lhv_feasible,
    strategy_behavior,
    verify_certificate,
)
from .sampling import RunTally, frequencies, merge, sample, sample_chunked
from .state import (
    Gamma,
    JointState,
    Pair,
    Path,
    Wing,
    inner_product,
    make_state,
    norm_squared,
    render_state,
    scale_add,
)

__version__ = "0.1.0"


def bundled_scheme_text(name: str) -> str:
    """Text of a bundled scheme file, ``"scheme_a"`` or ``"scheme_b"``."""
    return resources.files(__package__).joinpath("schemes", f"{name}.scm.txt").read_text("utf-8")
