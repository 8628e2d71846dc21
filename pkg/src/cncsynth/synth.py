"""Synthesis driver: encode, solve, decode, verify.

Every model returned here has passed the full polynomial checker
(:func:`cncsynth.checker.evaluate_spec`) after decoding, so an encoder or
solver defect can never silently produce a wrong answer — it raises
:class:`SoundnessError` instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from cncsynth.checker import EvaluationResult, evaluate_spec
from cncsynth.encoder import Encoding, Scope, decode, encode
from cncsynth.model import CncModel, validate_model
from cncsynth.sat import (RESOURCE_LIMIT, SAT, SolveStats, SolverConfig,
                          iter_assignments, solve)
from cncsynth.speclang import ResolvedSpec, StyleKind


class SynthOutcome(Enum):
    SAT = "sat"
    UNSAT = "unsat"  # no model within the given scope
    RESOURCE_LIMIT = "resource-limit"


class SoundnessError(Exception):
    """A decoded model failed independent verification."""


@dataclass
class SynthResult:
    outcome: SynthOutcome
    model: CncModel | None
    evaluation: EvaluationResult | None
    scope: Scope
    stats: SolveStats
    assignment: dict[int, bool] | None = None
    encoding: Encoding | None = None


def verify_closures(enc: Encoding, assignment: dict[int, bool], model: CncModel) -> None:
    """Check that the solver's reach/subt variables are exactly the transitive
    closures of the decoded model's connectors and containment."""
    from cncsynth.model import PortRef, contains_transitive

    vm = enc.varmap
    for c in enc.scope.components:
        for d in enc.scope.components:
            if c == d:
                continue
            v = vm.get("subt", c, d)
            if v is None:
                continue
            truth = (c in model.by_name and d in model.by_name
                     and contains_transitive(model, c, d))
            if assignment.get(v, False) != truth:
                raise SoundnessError(f"subt({c}, {d}) is {assignment.get(v)}, closure says {truth}")

    slot_ref: dict[int, PortRef] = {}
    for p in range(enc.scope.ports):
        v = vm.get("used", p)
        if v is None or not assignment.get(v, False):
            continue
        owner = next(c for c in enc.scope.components if assignment.get(vm.get("owner", p, c), False))
        name = next(n for n in enc.scope.port_names if assignment.get(vm.get("pname", p, n), False))
        slot_ref[p] = PortRef(owner, name)
    edges = {(s, t) for s in slot_ref for t in slot_ref
             if s != t and assignment.get(vm.get("conn", s, t), False)}
    closure: set[tuple[int, int]] = set(edges)
    changed = True
    while changed:
        changed = False
        for a, b in list(closure):
            for b2, c in edges:
                if b2 == b and (a, c) not in closure:
                    closure.add((a, c))
                    changed = True
    for p in range(enc.scope.ports):
        for q in range(enc.scope.ports):
            if p == q:
                continue
            v = vm.get("reach", p, q)
            if v is None:
                continue
            truth = (p, q) in closure
            if assignment.get(v, False) != truth:
                raise SoundnessError(f"reach({p}, {q}) is {assignment.get(v)}, closure says {truth}")


def _verified(model: CncModel, spec: ResolvedSpec) -> EvaluationResult:
    multi_ok = spec.style.kind in (StyleKind.CLIENT_SERVER, StyleKind.LAYERED)
    bad = validate_model(model, allow_multiple_tops=multi_ok)
    if bad:
        raise SoundnessError("decoded model is ill-formed: " + "; ".join(str(v) for v in bad))
    evaluation = evaluate_spec(model, spec)
    if not evaluation.overall:
        failing = sorted(n for n, ok in evaluation.per_view.items() if not ok)
        raise SoundnessError(
            "decoded model does not satisfy the specification "
            f"(formula={evaluation.formula_value}, failing views={failing}, "
            f"constraints={[str(v) for v in evaluation.constraint_violations]})")
    return evaluation


def synthesize(spec: ResolvedSpec, scope: Scope | None = None,
               config: SolverConfig = SolverConfig()) -> SynthResult:
    """Synthesize one model satisfying ``spec`` within ``scope`` (default:
    :func:`cncsynth.encoder.compute_scope`)."""
    enc = encode(spec, scope)
    result = solve(enc.cnf, config)
    if result.status == RESOURCE_LIMIT:
        return SynthResult(SynthOutcome.RESOURCE_LIMIT, None, None, enc.scope, result.stats)
    if result.status != SAT:
        return SynthResult(SynthOutcome.UNSAT, None, None, enc.scope, result.stats)
    model = decode(enc, result.assignment)
    verify_closures(enc, result.assignment, model)
    evaluation = _verified(model, spec)
    return SynthResult(SynthOutcome.SAT, model, evaluation, enc.scope, result.stats,
                       assignment=result.assignment, encoding=enc)


def enumerate_models(spec: ResolvedSpec, limit: int | None = None,
                     scope: Scope | None = None,
                     config: SolverConfig = SolverConfig()) -> Iterator[CncModel]:
    """Yield pairwise-distinct models satisfying ``spec`` within the scope.

    Slot symmetry breaking makes structural assignments canonical per model,
    so blocking on the structural variables walks distinct models; iteration
    ends when the scope is exhausted.  A solver resource limit raises
    TimeoutError to keep an exhausted scope distinguishable from an
    interrupted search.
    """
    enc: Encoding = encode(spec, scope)
    produced = 0
    for result in iter_assignments(enc.cnf, config, list(enc.structural_vars)):
        if result.status == RESOURCE_LIMIT:
            raise TimeoutError("solver resource limit reached during enumeration")
        if result.status != SAT:
            return
        model = decode(enc, result.assignment)
        verify_closures(enc, result.assignment, model)
        _verified(model, spec)
        yield model
        produced += 1
        if limit is not None and produced >= limit:
            return
