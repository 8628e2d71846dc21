"""Polynomial-time satisfaction checking: model vs. view, and model vs. full
specification (including styles, library components, and interface
completeness)."""

from __future__ import annotations

from dataclasses import dataclass, field

from cncsynth.model import (
    AbstractConnector,
    CncModel,
    CncView,
    Direction,
    PortGraph,
    PortRef,
    contains_transitive,
    port_chain_graph,
    validate_model,
)
from cncsynth.speclang import (
    LibraryDecl,
    ResolvedSpec,
    StyleConfig,
    StyleKind,
    evaluate_formula,
)


class IllFormedModelError(Exception):
    def __init__(self, violations):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


@dataclass(frozen=True)
class ViewViolation:
    kind: str  # MISSING_TYPE | MISSING_COMPONENT | CONTAINMENT | INDEPENDENCE | PORT_MISMATCH | NO_CHAIN
    subject: str
    explanation: str

    def __str__(self) -> str:
        return f"{self.kind} {self.subject}: {self.explanation}"


@dataclass(frozen=True)
class SatisfactionResult:
    satisfied: bool
    violations: tuple[ViewViolation, ...]
    chain_witnesses: dict[AbstractConnector, tuple[tuple[PortRef, PortRef], ...]] = field(default_factory=dict)


def _endpoint_ports(m: CncModel, cmp: str, port_name: str | None, port_type: str | None) -> list[PortRef]:
    """Model ports of ``cmp`` admissible as a chain endpoint."""
    c = m.by_name.get(cmp)
    if c is None:
        return []
    out = []
    for p in c.ports:
        if port_name is not None and p.name != port_name:
            continue
        if port_type is not None and p.type != port_type:
            continue
        out.append(PortRef(cmp, p.name))
    return out


def satisfies(m: CncModel, v: CncView,
              _multiple_tops_ok: bool = False) -> SatisfactionResult:
    """Check whether model ``m`` satisfies view ``v``.

    Inclusion of types/components/ports, the containment biconditional
    (view containment iff model transitive containment, so unrelated view
    components must be independent in the model), and a connector chain for
    every abstract connector.  Runs BFS on the port graph, so polynomial.
    """
    bad = validate_model(m, allow_multiple_tops=_multiple_tops_ok)
    if bad:
        raise IllFormedModelError(bad)

    violations: list[ViewViolation] = []
    for t in sorted(v.types):
        if t not in m.types:
            violations.append(ViewViolation("MISSING_TYPE", t, "type not present in the model"))
    for c in v.components:
        if c.name not in m.by_name:
            violations.append(ViewViolation("MISSING_COMPONENT", c.name, "component not present in the model"))

    # Ports: every view port must occur on the same component with the same
    # name and direction; an unknown type matches any model type.
    for c in v.components:
        mc = m.by_name.get(c.name)
        if mc is None:
            continue
        for p in c.ports:
            mp = mc.port(p.name)
            if mp is None or mp.direction != p.direction or (p.type is not None and mp.type != p.type):
                want = p.type if p.type is not None else "?"
                violations.append(ViewViolation(
                    "PORT_MISMATCH", f"{c.name}.{p.name}",
                    f"model has no {p.direction.value} port {p.name!r} of type {want}"))

    # Containment biconditional over all pairs of view components.
    names = [c.name for c in v.components]
    for a in names:
        for b in names:
            if a == b or a not in m.by_name or b not in m.by_name:
                continue
            in_view = (a, b) in v.contains
            in_model = contains_transitive(m, a, b)
            if in_view and not in_model:
                violations.append(ViewViolation("CONTAINMENT", f"{a} > {b}",
                                                "view containment not realized in the model"))
            elif not in_view and in_model:
                violations.append(ViewViolation("INDEPENDENCE", f"{a} > {b}",
                                                "model nests components the view keeps independent"))

    graph = port_chain_graph(m)
    witnesses: dict[AbstractConnector, tuple[tuple[PortRef, PortRef], ...]] = {}
    for ac in v.abs_connectors:
        if ac.src_cmp not in m.by_name or ac.tgt_cmp not in m.by_name:
            continue
        sources = _endpoint_ports(m, ac.src_cmp, ac.src_port, ac.src_type)
        targets = _endpoint_ports(m, ac.tgt_cmp, ac.tgt_port, ac.tgt_type)
        chain = graph.shortest_chain(sources, set(targets)) if sources and targets else None
        if chain is None:
            violations.append(ViewViolation("NO_CHAIN", str(ac),
                                            "no connector chain realizes the abstract connector"))
        else:
            witnesses[ac] = tuple(chain)

    return SatisfactionResult(not violations, tuple(violations), witnesses)


# --- Full-specification evaluation -------------------------------------------

@dataclass(frozen=True)
class StyleViolation:
    subject: str
    explanation: str

    def __str__(self) -> str:
        return f"{self.subject}: {self.explanation}"


@dataclass(frozen=True)
class EvaluationResult:
    overall: bool
    per_view: dict[str, bool]
    formula_value: bool
    constraint_violations: tuple[StyleViolation, ...]


def _library_violations(m: CncModel, library: tuple[LibraryDecl, ...]) -> list[StyleViolation]:
    out = []
    for decl in library:
        c = m.by_name.get(decl.component)
        if c is None:
            continue
        if c.subcomponents:
            out.append(StyleViolation(decl.component, "library component has subcomponents"))
        have = {(p.name, p.direction, p.type) for p in c.ports}
        want = set(decl.interface)
        if have != want:
            out.append(StyleViolation(decl.component,
                                      f"interface differs from the library declaration ({sorted(have)} vs {sorted(want)})"))
    return out


def _interface_complete_violations(m: CncModel, spec: ResolvedSpec) -> list[StyleViolation]:
    out = []
    for vname, cname in sorted(spec.interface_complete):
        view = spec.views[vname]
        declared = view.by_name[cname].ports
        mc = m.by_name.get(cname)
        if mc is None:
            continue
        if {p.name for p in mc.ports} != {p.name for p in declared}:
            out.append(StyleViolation(cname,
                                      f"ports are not exactly those declared interface-complete in view {vname}"))
            continue
        for p in declared:
            mp = mc.port(p.name)
            if mp.direction != p.direction or (p.type is not None and mp.type != p.type):
                out.append(StyleViolation(f"{cname}.{p.name}", "port attributes differ from the interface-complete declaration"))
    return out


def end_to_end_graph(m: CncModel) -> set[tuple[str, str]]:
    """Component pairs (c1, c2) with an end-to-end connection: a chain from a
    port of c1 with no incoming connector to a port of c2 with no outgoing
    connector."""
    graph = port_chain_graph(m)
    has_incoming = {t for _, t in graph.edges}
    has_outgoing = {s for s, _ in graph.edges}
    edges: set[tuple[str, str]] = set()
    for c in m.components:
        sources = [PortRef(c.name, p.name) for p in c.ports if PortRef(c.name, p.name) not in has_incoming]
        reachable: set[PortRef] = set()
        work = list(sources)
        seen = set(work)
        while work:
            p = work.pop()
            for q in graph.successors(p):
                if q not in seen:
                    seen.add(q)
                    reachable.add(q)
                    work.append(q)
        for q in reachable:
            if q not in has_outgoing:
                edges.add((c.name, q.component))
    return edges


def _cycle_violations(edges: set[tuple[str, str]]) -> list[StyleViolation]:
    adj: dict[str, set[str]] = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
    # Transitive closure, then look for mutually-reaching pairs or self loops.
    out = []
    for start in sorted(adj):
        seen: set[str] = set()
        work = list(adj[start])
        while work:
            n = work.pop()
            if n in seen:
                continue
            seen.add(n)
            work.extend(adj.get(n, ()))
        if start in seen:
            out.append(StyleViolation(start, "end-to-end communication cycle through component"))
    return out


def _style_violations(m: CncModel, style: StyleConfig) -> list[StyleViolation]:
    out: list[StyleViolation] = []
    if style.kind is StyleKind.NONE:
        return out
    if style.kind is StyleKind.HIERARCHICAL:
        return _cycle_violations(end_to_end_graph(m))

    if style.kind is StyleKind.CLIENT_SERVER:
        expected = {style.server, *style.clients}
        if set(m.tops) != expected:
            out.append(StyleViolation(", ".join(m.tops), "top components are not exactly the server and clients"))
        direct: dict[str, set[str]] = {}
        for conn in m.connectors:
            direct.setdefault(conn.src.component, set()).add(conn.tgt.component)
        for client in style.clients:
            if client not in m.by_name:
                out.append(StyleViolation(client, "client missing from the model"))
                continue
            linked = style.server in direct.get(client, ()) or client in direct.get(style.server, ())
            if not linked:
                out.append(StyleViolation(client, "client is not immediately connected to the server"))
            for other in style.clients:
                if other != client and other in direct.get(client, ()):
                    out.append(StyleViolation(f"{client} -> {other}", "direct connector between two clients"))
        return out

    # Layered: tops are the layer members; direct connectors only within a
    # layer or between consecutive layers (judged by top-level ancestors).
    members = [c for layer in style.layers for c in layer]
    if set(m.tops) != set(members):
        out.append(StyleViolation(", ".join(m.tops), "top components are not exactly the layer members"))
    layer_of: dict[str, int] = {}
    for i, layer in enumerate(style.layers):
        for c in layer:
            layer_of[c] = i
    def top_layer(cname: str) -> int | None:
        for anc in m.tops:
            if anc == cname or contains_transitive(m, anc, cname):
                return layer_of.get(anc)
        return None
    for conn in m.connectors:
        li, lj = top_layer(conn.src.component), top_layer(conn.tgt.component)
        if li is None or lj is None or abs(li - lj) > 1:
            out.append(StyleViolation(str(conn), "connector crosses non-consecutive layers"))
    return out


def evaluate_spec(m: CncModel, spec: ResolvedSpec) -> EvaluationResult:
    """Full post-hoc verification of a model against a resolved specification:
    the pattern-expanded formula over per-view satisfaction, plus library,
    interface-complete, and style conformance."""
    multi_ok = spec.style.kind in (StyleKind.CLIENT_SERVER, StyleKind.LAYERED)
    per_view = {name: satisfies(m, view, _multiple_tops_ok=multi_ok).satisfied
                for name, view in sorted(spec.views.items())}
    formula_value = evaluate_formula(spec.expanded_formula, per_view)
    constraint_violations = (
        _library_violations(m, spec.library)
        + _interface_complete_violations(m, spec)
        + _style_violations(m, spec.style)
    )
    return EvaluationResult(
        overall=formula_value and not constraint_violations,
        per_view=per_view,
        formula_value=formula_value,
        constraint_violations=tuple(constraint_violations),
    )
