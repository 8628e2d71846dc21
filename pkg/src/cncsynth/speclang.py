"""Specification layer: Boolean formulas over views, patterns, library
components, interface-complete markings, and architectural styles."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from cncsynth.model import CncView, Component, Direction


# --- Boolean formulas over view names ---------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]

    def __init__(self, args) -> None:
        object.__setattr__(self, "args", tuple(args))


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]

    def __init__(self, args) -> None:
        object.__setattr__(self, "args", tuple(args))


Formula = Var | Not | And | Or


def formula_vars(f: Formula) -> set[str]:
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, Not):
        return formula_vars(f.arg)
    out: set[str] = set()
    for a in f.args:
        out |= formula_vars(a)
    return out


def evaluate_formula(f: Formula, valuation: dict[str, bool]) -> bool:
    if isinstance(f, Var):
        return valuation[f.name]
    if isinstance(f, Not):
        return not evaluate_formula(f.arg, valuation)
    if isinstance(f, And):
        return all(evaluate_formula(a, valuation) for a in f.args)
    return any(evaluate_formula(a, valuation) for a in f.args)


def formula_polarities(f: Formula, positive: bool = True,
                       acc: dict[str, set[bool]] | None = None) -> dict[str, set[bool]]:
    """Map view name -> set of polarities under which it occurs."""
    if acc is None:
        acc = {}
    if isinstance(f, Var):
        acc.setdefault(f.name, set()).add(positive)
    elif isinstance(f, Not):
        formula_polarities(f.arg, not positive, acc)
    else:
        for a in f.args:
            formula_polarities(a, positive, acc)
    return acc


def format_formula(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        return f"!{format_formula(f.arg)}" if isinstance(f.arg, Var) else f"!({format_formula(f.arg)})"
    op = " && " if isinstance(f, And) else " || "
    parts = []
    for a in f.args:
        s = format_formula(a)
        if isinstance(a, (And, Or)) and type(a) is not type(f):
            s = f"({s})"
        parts.append(s)
    return op.join(parts) if parts else ("1" if isinstance(f, And) else "0")


# --- Patterns, library declarations, styles ---------------------------------

class PatternKind(Enum):
    ALT = "alt"
    XALT = "xalt"
    IMP = "imp"
    NOCOMP = "nocomp"


@dataclass(frozen=True)
class Pattern:
    """ALT/XALT over >= 1 view names, IMP over two (second optionally
    negated), NOCOMP over one component name."""

    kind: PatternKind
    args: tuple[str, ...]
    negated_second: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "args", tuple(self.args))
        n = len(self.args)
        if self.kind in (PatternKind.ALT, PatternKind.XALT) and n < 1:
            raise ValueError(f"{self.kind.value} needs at least one view")
        if self.kind is PatternKind.IMP and n != 2:
            raise ValueError("imp needs exactly two views")
        if self.kind is PatternKind.NOCOMP and n != 1:
            raise ValueError("nocomp names exactly one component")
        if self.negated_second and self.kind is not PatternKind.IMP:
            raise ValueError("only imp supports a negated second argument")


@dataclass(frozen=True)
class LibraryDecl:
    """A black-box component with its complete interface."""

    component: str
    interface: tuple[tuple[str, Direction, str], ...]  # (port name, direction, type)

    def __post_init__(self) -> None:
        object.__setattr__(self, "interface", tuple(self.interface))


class StyleKind(Enum):
    NONE = "none"
    HIERARCHICAL = "hierarchical"
    CLIENT_SERVER = "client-server"
    LAYERED = "layered"


@dataclass(frozen=True)
class StyleConfig:
    kind: StyleKind = StyleKind.NONE
    server: str | None = None
    clients: tuple[str, ...] = ()
    layers: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "clients", tuple(self.clients))
        object.__setattr__(self, "layers", tuple(tuple(l) for l in self.layers))
        if self.kind is StyleKind.CLIENT_SERVER:
            if not self.server or not self.clients:
                raise ValueError("client-server style needs a server and at least one client")
            if self.server in self.clients:
                raise ValueError("the server cannot also be a client")
        if self.kind is StyleKind.LAYERED:
            if len(self.layers) < 2 or any(not l for l in self.layers):
                raise ValueError("layered style needs at least two nonempty layers")
            flat = [c for l in self.layers for c in l]
            if len(flat) != len(set(flat)):
                raise ValueError("layers must be disjoint")


@dataclass(frozen=True)
class ScopeHints:
    ports: int | None = None
    extra_names: int | None = None
    extra_types: int | None = None


@dataclass(frozen=True)
class ViewSpec:
    name: str
    views: tuple[CncView, ...]
    formula: Formula
    patterns: tuple[Pattern, ...] = ()
    library: tuple[LibraryDecl, ...] = ()
    interface_complete: frozenset[tuple[str, str]] = frozenset()  # (view, component)
    style: StyleConfig = StyleConfig()
    scope_hints: ScopeHints = ScopeHints()

    def __post_init__(self) -> None:
        object.__setattr__(self, "views", tuple(self.views))
        object.__setattr__(self, "patterns", tuple(self.patterns))
        object.__setattr__(self, "library", tuple(self.library))
        object.__setattr__(self, "interface_complete", frozenset(self.interface_complete))

    @property
    def view_names(self) -> list[str]:
        return [v.name for v in self.views]


def nocomp_view_name(component: str) -> str:
    return f"_no_{component}"


def implicit_views(spec: ViewSpec) -> list[CncView]:
    """Single-component views synthesized for each NOCOMP pattern."""
    out = []
    for pat in spec.patterns:
        if pat.kind is PatternKind.NOCOMP:
            cmp = pat.args[0]
            out.append(CncView.build(nocomp_view_name(cmp), [Component(cmp)]))
    return out


def _expand_one(pat: Pattern) -> Formula:
    if pat.kind is PatternKind.ALT:
        return Or(Var(v) for v in pat.args)
    if pat.kind is PatternKind.XALT:
        at_least = Or(Var(v) for v in pat.args)
        pairwise = [Not(And((Var(a), Var(b))))
                    for i, a in enumerate(pat.args) for b in pat.args[i + 1:]]
        return And([at_least, *pairwise])
    if pat.kind is PatternKind.IMP:
        a, b = pat.args
        conseq: Formula = Not(Var(b)) if pat.negated_second else Var(b)
        return Or((Not(Var(a)), conseq))
    return Not(Var(nocomp_view_name(pat.args[0])))


def expand_patterns(spec: ViewSpec) -> Formula:
    """The spec formula conjoined with the expansion of every pattern."""
    known = set(spec.view_names) | {v.name for v in implicit_views(spec)}
    for pat in spec.patterns:
        if pat.kind is not PatternKind.NOCOMP:
            for v in pat.args:
                if v not in known:
                    raise SpecResolutionError([f"pattern {pat.kind.value} references unknown view {v!r}"])
    if not spec.patterns:
        return spec.formula
    return And([spec.formula, *(_expand_one(p) for p in spec.patterns)])


# --- Resolution --------------------------------------------------------------

class SpecResolutionError(Exception):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class ResolvedSpec:
    """A name-resolved specification: all views (including implicit NOCOMP
    views) keyed by name, with the pattern-expanded formula."""

    name: str
    views: dict[str, CncView]
    formula: Formula
    expanded_formula: Formula
    patterns: tuple[Pattern, ...]
    library: tuple[LibraryDecl, ...]
    interface_complete: frozenset[tuple[str, str]]
    style: StyleConfig
    scope_hints: ScopeHints

    @property
    def component_names(self) -> list[str]:
        names = {c.name for v in self.views.values() for c in v.components}
        names.update(l.component for l in self.library)
        if self.style.kind is StyleKind.CLIENT_SERVER:
            names.add(self.style.server)
            names.update(self.style.clients)
        elif self.style.kind is StyleKind.LAYERED:
            names.update(c for l in self.style.layers for c in l)
        return sorted(names)


def resolve(spec: ViewSpec) -> ResolvedSpec:
    """Bind all references; raise SpecResolutionError listing every problem."""
    errors: list[str] = []
    views: dict[str, CncView] = {}
    for v in spec.views:
        if v.name in views:
            errors.append(f"duplicate view name {v.name!r}")
        views[v.name] = v
    for v in implicit_views(spec):
        if v.name in views:
            errors.append(f"view name {v.name!r} collides with a NOCOMP expansion")
        views[v.name] = v

    for name in sorted(formula_vars(spec.formula)):
        if name not in views:
            errors.append(f"formula references unknown view {name!r}")
    for pat in spec.patterns:
        if pat.kind is not PatternKind.NOCOMP:
            for v in pat.args:
                if v not in views:
                    errors.append(f"pattern {pat.kind.value} references unknown view {v!r}")

    # A library component is a black box: no view may give it subcomponents.
    lib_names = set()
    for decl in spec.library:
        if decl.component in lib_names:
            errors.append(f"duplicate library declaration for {decl.component!r}")
        lib_names.add(decl.component)
        port_names = [n for n, _, _ in decl.interface]
        if len(port_names) != len(set(port_names)):
            errors.append(f"library component {decl.component!r} repeats a port name")
        for v in spec.views:
            cmp = v.by_name.get(decl.component)
            if cmp is not None and cmp.subcomponents:
                errors.append(
                    f"view {v.name!r} declares subcomponents for library component {decl.component!r}")

    for vname, cname in sorted(spec.interface_complete):
        v = views.get(vname)
        if v is None:
            errors.append(f"interface-complete marking references unknown view {vname!r}")
        elif cname not in v.by_name:
            errors.append(f"interface-complete marking references unknown component {cname!r} in view {vname!r}")

    all_components = {c.name for v in views.values() for c in v.components} | lib_names
    style = spec.style
    if style.kind is StyleKind.CLIENT_SERVER:
        for c in (style.server, *style.clients):
            if c not in all_components:
                errors.append(f"style references unknown component {c!r}")
    elif style.kind is StyleKind.LAYERED:
        for layer in style.layers:
            for c in layer:
                if c not in all_components:
                    errors.append(f"style references unknown component {c!r}")

    if errors:
        raise SpecResolutionError(errors)
    return ResolvedSpec(
        name=spec.name,
        views=views,
        formula=spec.formula,
        expanded_formula=expand_patterns(spec),
        patterns=spec.patterns,
        library=spec.library,
        interface_complete=spec.interface_complete,
        style=spec.style,
        scope_hints=spec.scope_hints,
    )
