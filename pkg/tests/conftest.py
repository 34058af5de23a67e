import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from laminar_mso.laminar import SetSystem, build_laminar_tree, system_from_nested
from laminar_mso.logic import syntax as sx
from laminar_mso.structures import RELATION, SETPRED, Vocabulary, make_structure
from laminar_mso.verify import ArityBias, gen_laminar

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def three_leaf():
    """U={a,b,c} with the cherry {a,b}."""
    return system_from_nested([["a", "b"], "c"])


@pytest.fixture
def three_leaf_tree(three_leaf):
    return build_laminar_tree(three_leaf)


@st.composite
def laminar_systems(draw, max_leaves: int = 8, bias: ArityBias = ArityBias()) -> SetSystem:
    n = draw(st.integers(1, max_leaves))
    return gen_laminar(draw(st.integers(0, 2**32 - 1)), n, bias)


# small mixed vocabulary for random formulas and structures
MIXED = Vocabulary.of(("E", RELATION, 2), ("P", RELATION, 1), ("SET", SETPRED, 1))
ELEMS = ("x", "y")
SETS = ("X", "Y")


@st.composite
def structures(draw, max_elements: int = 3):
    n = draw(st.integers(1, max_elements))
    u = [f"u{k}" for k in range(n)]
    elem = st.sampled_from(u)
    edges = draw(st.lists(st.tuples(elem, elem), max_size=6))
    unary = draw(st.lists(elem, max_size=n))
    fam = draw(st.lists(st.frozensets(elem), max_size=4))
    return make_structure(MIXED, u, {"E": edges, "P": [(e,) for e in unary], "SET": fam})


def _atoms():
    e = st.sampled_from(ELEMS)
    s = st.sampled_from(SETS)
    return st.one_of(
        st.builds(lambda a, b: sx.Rel("E", (a, b)), e, e),
        st.builds(lambda a: sx.Rel("P", (a,)), e),
        st.builds(lambda a: sx.Pred("SET", a), s),
        st.builds(sx.In, e, s),
        st.builds(sx.Eq, e, e),
        st.builds(sx.SetEq, s, s),
        st.builds(sx.Subset, s, s),
    )


def _extend(children):
    e = st.sampled_from(ELEMS)
    s = st.sampled_from(SETS)
    parts = st.lists(children, min_size=2, max_size=3).map(tuple)
    return st.one_of(
        st.builds(sx.Not, children),
        st.builds(sx.And, parts),
        st.builds(sx.Or, parts),
        st.builds(sx.Implies, children, children),
        st.builds(sx.Iff, children, children),
        st.builds(sx.Exists, e, children),
        st.builds(sx.Forall, e, children),
        st.builds(sx.ExistsSet, s, children),
        st.builds(sx.ForallSet, s, children),
    )


formulas = st.recursive(_atoms(), _extend, max_leaves=6)
