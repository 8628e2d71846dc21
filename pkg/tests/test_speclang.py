"""Formulas, patterns, and specification resolution."""

from __future__ import annotations

import pytest

from cncsynth.model import CncView, Component, Direction
from cncsynth.speclang import (
    And,
    LibraryDecl,
    Not,
    Or,
    Pattern,
    PatternKind,
    SpecResolutionError,
    StyleConfig,
    StyleKind,
    Var,
    ViewSpec,
    evaluate_formula,
    expand_patterns,
    format_formula,
    formula_polarities,
    formula_vars,
    implicit_views,
    nocomp_view_name,
    resolve,
)


def view(name: str) -> CncView:
    return CncView.build(name, [Component("C" + name)])


def spec_with(patterns=(), **kw) -> ViewSpec:
    views = (view("A"), view("B"), view("C"))
    return ViewSpec("s", views, Var("A"), patterns=tuple(patterns), **kw)


def test_formula_helpers():
    f = Or((And((Var("A"), Not(Var("B")))), Var("C")))
    assert formula_vars(f) == {"A", "B", "C"}
    assert evaluate_formula(f, {"A": True, "B": False, "C": False})
    assert not evaluate_formula(f, {"A": True, "B": True, "C": False})
    assert formula_polarities(f) == {"A": {True}, "B": {False}, "C": {True}}
    assert format_formula(f) == "(A && !B) || C"


def test_formula_polarities_both():
    f = And((Var("A"), Not(Var("A"))))
    assert formula_polarities(f) == {"A": {True, False}}


def test_imp_expansion():
    s = spec_with([Pattern(PatternKind.IMP, ("A", "B"))])
    f = expand_patterns(s)
    assert f == And([Var("A"), Or((Not(Var("A")), Var("B")))])


def test_imp_negated_second():
    s = spec_with([Pattern(PatternKind.IMP, ("A", "B"), negated_second=True)])
    f = expand_patterns(s)
    assert f == And([Var("A"), Or((Not(Var("A")), Not(Var("B"))))])


def test_alt_and_xalt_expansion():
    s = spec_with([Pattern(PatternKind.ALT, ("A", "B"))])
    assert expand_patterns(s) == And([Var("A"), Or((Var("A"), Var("B")))])

    s = spec_with([Pattern(PatternKind.XALT, ("A", "B", "C"))])
    f = expand_patterns(s)
    # at-least-one plus pairwise mutual exclusion: semantics = exactly one.
    # Check on the expansion conjuncts only (skip the base formula).
    expansion = And(f.args[1:])
    assert evaluate_formula(expansion, {"A": True, "B": False, "C": False})
    assert not evaluate_formula(expansion, {"A": True, "B": True, "C": False})
    assert not evaluate_formula(expansion, {"A": False, "B": False, "C": False})


def test_nocomp_creates_implicit_view_and_negation():
    s = spec_with([Pattern(PatternKind.NOCOMP, ("Widget",))])
    (iv,) = implicit_views(s)
    assert iv.name == nocomp_view_name("Widget")
    assert [c.name for c in iv.components] == ["Widget"]
    f = expand_patterns(s)
    assert Not(Var(nocomp_view_name("Widget"))) in f.args


def test_pattern_arity_validation():
    with pytest.raises(ValueError):
        Pattern(PatternKind.IMP, ("A",))
    with pytest.raises(ValueError):
        Pattern(PatternKind.NOCOMP, ("A", "B"))
    with pytest.raises(ValueError):
        Pattern(PatternKind.ALT, ("A",), negated_second=True)


def test_resolve_success_includes_implicit_views():
    s = spec_with([Pattern(PatternKind.NOCOMP, ("Widget",))])
    r = resolve(s)
    assert set(r.views) == {"A", "B", "C", nocomp_view_name("Widget")}
    assert "Widget" in r.component_names


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda s: ViewSpec("s", s.views, Var("Nope")), "unknown view"),
        (lambda s: ViewSpec("s", s.views + (view("A"),), Var("A")), "duplicate view"),
        (lambda s: ViewSpec("s", s.views, Var("A"),
                            patterns=(Pattern(PatternKind.IMP, ("A", "Zed")),)), "unknown view"),
        (lambda s: ViewSpec("s", s.views, Var("A"),
                            interface_complete=frozenset({("A", "Ghost")})), "unknown component"),
        (lambda s: ViewSpec("s", s.views, Var("A"),
                            interface_complete=frozenset({("Zed", "CA")})), "unknown view"),
        (lambda s: ViewSpec("s", s.views, Var("A"),
                            style=StyleConfig(StyleKind.CLIENT_SERVER, server="Ghost",
                                              clients=("CA",))), "unknown component"),
    ],
)
def test_resolve_errors(mutate, needle):
    with pytest.raises(SpecResolutionError) as err:
        resolve(mutate(spec_with()))
    assert needle in str(err.value)


def test_resolve_rejects_library_component_with_subcomponents():
    v = CncView.build("V", [Component("Lib", subcomponents=frozenset({"Inner"})),
                            Component("Inner")])
    s = ViewSpec("s", (v,), Var("V"),
                 library=(LibraryDecl("Lib", (("p", Direction.IN, "t"),)),))
    with pytest.raises(SpecResolutionError) as err:
        resolve(s)
    assert "library" in str(err.value)


def test_resolve_rejects_duplicate_library_port_names():
    s = ViewSpec("s", (view("A"),), Var("A"),
                 library=(LibraryDecl("Lib", (("p", Direction.IN, "t"),
                                              ("p", Direction.OUT, "t"))),))
    with pytest.raises(SpecResolutionError):
        resolve(s)


def test_style_config_validation():
    with pytest.raises(ValueError):
        StyleConfig(StyleKind.CLIENT_SERVER, server="S", clients=())
    with pytest.raises(ValueError):
        StyleConfig(StyleKind.LAYERED, layers=(("A",),))
    with pytest.raises(ValueError):
        StyleConfig(StyleKind.LAYERED, layers=(("A",), ("A",)))
