"""Core domain types: C&C models, C&C views, and well-formedness validation.

A model is a complete architecture: a containment tree of named components
with typed, directed ports and concrete connectors.  A view is a partial
description: its subcomponent edges mean *transitive* containment, its ports
may leave the type unknown, and its abstract connectors stand for chains of
concrete connectors.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property


class Direction(Enum):
    IN = "in"
    OUT = "out"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Port:
    """A named, directed port.  ``type`` may be None (unknown) in views only."""

    name: str
    direction: Direction
    type: str | None = None


@dataclass(frozen=True)
class Component:
    name: str
    ports: tuple[Port, ...] = ()
    subcomponents: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "ports", tuple(sorted(self.ports, key=lambda p: (p.name, p.direction.value))))
        object.__setattr__(self, "subcomponents", frozenset(self.subcomponents))

    def port(self, name: str) -> Port | None:
        for p in self.ports:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True, order=True)
class PortRef:
    """A port identified by (component name, port name)."""

    component: str
    port: str

    def __str__(self) -> str:
        return f"{self.component}.{self.port}"


@dataclass(frozen=True, order=True)
class Connector:
    """A directed concrete connector between two ports of a model."""

    src: PortRef
    tgt: PortRef

    def __str__(self) -> str:
        return f"{self.src} -> {self.tgt}"


@dataclass(frozen=True, order=True)
class AbstractConnector:
    """A view-level edge: src component reaches tgt component by some chain.

    Port names / types at either endpoint are optional constraints; None
    leaves them unconstrained.
    """

    src_cmp: str
    tgt_cmp: str
    src_port: str | None = None
    tgt_port: str | None = None
    src_type: str | None = None
    tgt_type: str | None = None

    def __str__(self) -> str:
        src = self.src_cmp if self.src_port is None else f"{self.src_cmp}.{self.src_port}"
        tgt = self.tgt_cmp if self.tgt_port is None else f"{self.tgt_cmp}.{self.tgt_port}"
        return f"{src} -> {tgt}"


def _index(components: tuple[Component, ...]) -> dict[str, Component]:
    return {c.name: c for c in components}


@dataclass(frozen=True)
class CncModel:
    """A complete C&C model.  Canonicalized on construction, so ``==`` is
    structural equality."""

    components: tuple[Component, ...]
    connectors: tuple[Connector, ...] = ()
    types: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(sorted(self.components, key=lambda c: c.name)))
        object.__setattr__(self, "connectors", tuple(sorted(set(self.connectors))))
        object.__setattr__(self, "types", frozenset(self.types))

    @staticmethod
    def build(components: list[Component] | tuple[Component, ...],
              connectors: list[Connector] | tuple[Connector, ...] = ()) -> "CncModel":
        """Construct a model, deriving the type set from the ports."""
        types = {p.type for c in components for p in c.ports if p.type is not None}
        return CncModel(tuple(components), tuple(connectors), frozenset(types))

    @cached_property
    def by_name(self) -> dict[str, Component]:
        return _index(self.components)

    @cached_property
    def parent_map(self) -> dict[str, str]:
        """Child name -> parent name, from the immediate-subcomponent sets."""
        parents: dict[str, str] = {}
        for c in self.components:
            for child in c.subcomponents:
                parents.setdefault(child, c.name)
        return parents

    @cached_property
    def tops(self) -> tuple[str, ...]:
        return tuple(sorted(c.name for c in self.components if c.name not in self.parent_map))

    @property
    def top(self) -> str:
        if len(self.tops) != 1:
            raise ValueError(f"model has {len(self.tops)} top components, expected 1")
        return self.tops[0]

    def component(self, name: str) -> Component:
        try:
            return self.by_name[name]
        except KeyError:
            raise LookupError(f"unknown component {name!r}") from None

    def port(self, ref: PortRef) -> Port:
        p = self.component(ref.component).port(ref.port)
        if p is None:
            raise LookupError(f"unknown port {ref}")
        return p


@dataclass(frozen=True)
class CncView:
    """A partial C&C view.  Subcomponent edges mean transitive containment."""

    name: str
    components: tuple[Component, ...]
    abs_connectors: tuple[AbstractConnector, ...] = ()
    types: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(sorted(self.components, key=lambda c: c.name)))
        object.__setattr__(self, "abs_connectors", tuple(sorted(set(self.abs_connectors))))
        object.__setattr__(self, "types", frozenset(self.types))

    @staticmethod
    def build(name: str, components: list[Component] | tuple[Component, ...],
              abs_connectors: list[AbstractConnector] | tuple[AbstractConnector, ...] = ()) -> "CncView":
        types = {p.type for c in components for p in c.ports if p.type is not None}
        for ac in abs_connectors:
            types.update(t for t in (ac.src_type, ac.tgt_type) if t is not None)
        return CncView(name, tuple(components), tuple(abs_connectors), frozenset(types))

    @cached_property
    def by_name(self) -> dict[str, Component]:
        return _index(self.components)

    @cached_property
    def contains(self) -> frozenset[tuple[str, str]]:
        """Transitive closure of the view's declared containment edges."""
        return _closure({c.name: set(c.subcomponents) for c in self.components})


def _closure(edges: dict[str, set[str]]) -> frozenset[tuple[str, str]]:
    pairs: set[tuple[str, str]] = set()
    for root in edges:
        seen: set[str] = set()
        work = deque(edges[root])
        while work:
            n = work.popleft()
            if n in seen:
                continue
            seen.add(n)
            work.extend(edges.get(n, ()))
        pairs.update((root, d) for d in seen)
    return frozenset(pairs)


@dataclass(frozen=True)
class Violation:
    """One broken well-formedness rule; validation reports data, not errors."""

    code: str
    subject: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.subject}: {self.message}"


def validate_model(m: CncModel, allow_multiple_tops: bool = False) -> list[Violation]:
    """Check every well-formedness rule of a C&C model.

    Returns an empty list iff the model is well-formed.  With
    ``allow_multiple_tops`` the single-top rule is relaxed (used by the
    client-server and layered styles, which designate several top
    components).
    """
    out: list[Violation] = []
    names = [c.name for c in m.components]
    for n in sorted(set(x for x in names if names.count(x) > 1)):
        out.append(Violation("duplicate-component", n, "component name declared more than once"))
    known = set(names)

    # Containment: edges resolve, every child has one parent, no cycles.
    child_parents: dict[str, list[str]] = {}
    for c in m.components:
        for child in sorted(c.subcomponents):
            if child not in known:
                out.append(Violation("unknown-subcomponent", c.name, f"subcomponent {child!r} is not a component"))
            elif child == c.name:
                out.append(Violation("containment-cycle", c.name, "component contains itself"))
            else:
                child_parents.setdefault(child, []).append(c.name)
    for child, parents in sorted(child_parents.items()):
        if len(parents) > 1:
            out.append(Violation("multiple-parents", child, f"contained in {', '.join(sorted(parents))}"))
    edges = {c.name: {s for s in c.subcomponents if s in known and s != c.name} for c in m.components}
    for a, b in sorted(_closure(edges)):
        if a == b:
            out.append(Violation("containment-cycle", a, "containment cycle through component"))
    if not allow_multiple_tops and len(m.components) > 0 and len(m.tops) != 1:
        out.append(Violation("top-count", ", ".join(m.tops) or "<none>",
                             f"model has {len(m.tops)} top components, expected exactly 1"))
    if len(m.components) == 0:
        out.append(Violation("empty-model", "<model>", "model has no components"))

    # Ports: complete attributes, unique names per component, declared types.
    for c in m.components:
        seen_ports: set[str] = set()
        for p in c.ports:
            if p.type is None:
                out.append(Violation("unknown-type", f"{c.name}.{p.name}", "model port with unknown type"))
            elif p.type not in m.types:
                out.append(Violation("undeclared-type", f"{c.name}.{p.name}", f"type {p.type!r} not in the model type set"))
            if p.name in seen_ports:
                out.append(Violation("duplicate-port", f"{c.name}.{p.name}", "port name reused within component"))
            seen_ports.add(p.name)

    # Connectors: endpoints resolve, equal types, legal placement/direction,
    # at most one incoming connector per port.
    incoming: dict[PortRef, list[Connector]] = {}
    for conn in m.connectors:
        ok = True
        for ref in (conn.src, conn.tgt):
            try:
                m.port(ref)
            except LookupError:
                out.append(Violation("unknown-port", str(ref), "connector endpoint does not exist"))
                ok = False
        if not ok:
            continue
        sp, tp = m.port(conn.src), m.port(conn.tgt)
        if sp.type != tp.type:
            out.append(Violation("type-mismatch", str(conn), f"connects {sp.type!r} to {tp.type!r}"))
        sc, tc = conn.src.component, conn.tgt.component
        if sc == tc:
            out.append(Violation("self-connector", str(conn), "connector within a single component"))
        elif m.parent_map.get(sc) == m.parent_map.get(tc):
            # Siblings (or two tops): plain dataflow, OUT -> IN.
            if sp.direction != Direction.OUT or tp.direction != Direction.IN:
                out.append(Violation("direction", str(conn), "sibling connector must go OUT -> IN"))
        elif m.parent_map.get(tc) == sc:
            if sp.direction != Direction.IN or tp.direction != Direction.IN:
                out.append(Violation("direction", str(conn), "input forwarding must go IN -> IN"))
        elif m.parent_map.get(sc) == tc:
            if sp.direction != Direction.OUT or tp.direction != Direction.OUT:
                out.append(Violation("direction", str(conn), "output forwarding must go OUT -> OUT"))
        else:
            out.append(Violation("locality", str(conn), "endpoints are neither siblings nor parent/immediate child"))
        incoming.setdefault(conn.tgt, []).append(conn)
    for ref, conns in sorted(incoming.items()):
        if len(conns) > 1:
            out.append(Violation("two-incoming", str(ref), f"port has {len(conns)} incoming connectors"))
    return out


def contains_transitive(m: CncModel, parent: str, child: str) -> bool:
    """True iff ``child`` is strictly inside ``parent`` in the containment tree."""
    m.component(parent)
    m.component(child)
    work = deque(m.component(parent).subcomponents)
    seen: set[str] = set()
    while work:
        n = work.popleft()
        if n == child:
            return True
        if n in seen:
            continue
        seen.add(n)
        if n in m.by_name:
            work.extend(m.by_name[n].subcomponents)
    return False


@dataclass(frozen=True)
class PortGraph:
    """Directed graph over ports; one edge per connector."""

    edges: tuple[tuple[PortRef, PortRef], ...]

    @cached_property
    def adjacency(self) -> dict[PortRef, tuple[PortRef, ...]]:
        adj: dict[PortRef, list[PortRef]] = {}
        for s, t in self.edges:
            adj.setdefault(s, []).append(t)
        return {s: tuple(sorted(ts)) for s, ts in adj.items()}

    def successors(self, p: PortRef) -> tuple[PortRef, ...]:
        return self.adjacency.get(p, ())

    def shortest_chain(self, sources: list[PortRef], targets: set[PortRef]) -> list[tuple[PortRef, PortRef]] | None:
        """BFS for a shortest connector chain (at least one edge) from any
        source to any target; ties broken by lexicographic port order."""
        starts = sorted(set(sources))
        prev: dict[PortRef, PortRef] = {}
        work = deque(starts)
        seen = set(starts)
        while work:
            p = work.popleft()
            for q in self.successors(p):
                if q in targets:
                    chain = [(p, q)]
                    node = p
                    while node in prev:
                        chain.append((prev[node], node))
                        node = prev[node]
                    chain.reverse()
                    return chain
                if q not in seen:
                    seen.add(q)
                    prev[q] = p
                    work.append(q)
        return None


def port_chain_graph(m: CncModel) -> PortGraph:
    """The directed port graph whose edges are the model's connectors."""
    return PortGraph(tuple((c.src, c.tgt) for c in m.connectors))
