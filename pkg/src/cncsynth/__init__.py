"""SAT-based synthesis of component-and-connector architectures from partial views."""

from cncsynth.model import (
    AbstractConnector,
    CncModel,
    CncView,
    Component,
    Connector,
    Direction,
    Port,
    PortRef,
    Violation,
    contains_transitive,
    port_chain_graph,
    validate_model,
)
from cncsynth.speclang import (
    And,
    LibraryDecl,
    Not,
    Or,
    Pattern,
    PatternKind,
    ResolvedSpec,
    SpecResolutionError,
    StyleConfig,
    StyleKind,
    Var,
    ViewSpec,
    expand_patterns,
    resolve,
)
from cncsynth.checker import SatisfactionResult, evaluate_spec, satisfies
from cncsynth.synth import SynthOutcome, SynthResult, enumerate_models, synthesize

__all__ = [
    "AbstractConnector",
    "And",
    "CncModel",
    "CncView",
    "Component",
    "Connector",
    "Direction",
    "LibraryDecl",
    "Not",
    "Or",
    "Pattern",
    "PatternKind",
    "Port",
    "PortRef",
    "ResolvedSpec",
    "SatisfactionResult",
    "SpecResolutionError",
    "StyleConfig",
    "StyleKind",
    "SynthOutcome",
    "SynthResult",
    "Var",
    "ViewSpec",
    "Violation",
    "contains_transitive",
    "enumerate_models",
    "evaluate_spec",
    "expand_patterns",
    "port_chain_graph",
    "resolve",
    "satisfies",
    "synthesize",
    "validate_model",
]
