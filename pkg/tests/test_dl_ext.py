from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
import pytest

from ctreed import constraints as Cn
from ctreed import domains as D
from ctreed import tgca as T
from ctreed.dl import core, ext
from ctreed.dl import syntax as S
from ctreed.errors import NominalsNotSupported, UnknownFeature, UnknownIndividual, UnsupportedConstruct

from corpus import ontologies
from oracles import alci_consistent
from strategies import dl_ontologies


def parse(text):
    return S.parse_ontology(text)


def consistent(text, logic="alco", domain=D.DENSE, **kw):
    return core.check_consistency(parse(text), domain, logic, **kw).consistent


def alci_bundles(text):
    comp = core.make_compiler(core.normalize(parse(text)), D.DENSE, "alci")
    out = []
    for k, choice in enumerate(comp.root_choices()):
        if k == 3:
            break
        out.extend(comp.build([choice]).bundles)
    return comp, out


def test_roles_invert():
    r = S.Role("r")
    assert r.inverse.inverse == r and r.inverse != r
    o = parse("(related a b (inv r))")
    assert o.abox == [S.RoleAssertion("b", "a", "r")]


def test_alci_examples():
    assert consistent("(instance a (some (inv r) A))", "alci")
    assert not consistent("(sub top (some r B)) (sub top (all (inv r) bot)) (instance a top)", "alci")
    with pytest.raises(NominalsNotSupported):
        consistent("(sub top (some (inv r) (nom a))) (instance b top)", "alci")


def test_alci_role_assertions():
    assert not consistent("(related a b r) (instance a (all r A)) (instance b (not A))", "alci")
    assert not consistent("(related a b r) (instance b (all (inv r) A)) (instance a (not A))", "alci")
    assert consistent("(related a b r) (instance b (all (inv r) A)) (instance a A)", "alci")
    assert not consistent("(related a b r) (instance a (all r (some r B))) (instance b (all r (not B)))", "alci")


def test_alci_concrete_paths():
    # Every element has an inverse-r neighbour with a smaller value; dense orders have no least element.
    chain = "(sub top (cd-some ((v1 f) (v2 ((inv r) f))) (lt v2 v1))) (instance a top)"
    v = core.check_consistency(parse(chain), D.DENSE, "alci", witness_depth=3)
    assert v.consistent and T.check_run_prefix(v.automaton, *v.witness)
    loop = "(sub top (cd-some ((v1 f) (v2 ((inv r) f))) (lt v2 v1))) (sub top (cd-all ((v1 f) (v2 ((inv r) f))) (lt v1 v2))) (instance a top)"
    assert not consistent(loop, "alci")


def test_alci_parameters():
    o = core.normalize(parse("(instance a (cd-some ((v f)) (lt v v))) (instance b (some (inv r) top))"))
    comp = core.make_compiler(o, D.DENSE, "alci")
    P = comp.P
    assert P.beta == P.alpha * (P.eta + 2)
    assert comp.parent_offset() == P.alpha
    assert [comp.ind_reg(l, 1) for l in range(P.eta)] == [P.alpha * (l + 2) + 1 for l in range(P.eta)]


def test_alci_parent_copies_in_witnesses():
    text = "(sub top (cd-some ((v1 f) (v2 ((inv r) f))) (lt v2 v1))) (sub top (some r top)) (instance a top)"
    v = core.check_consistency(parse(text), D.DENSE, "alci", witness_depth=3)
    tree, run = v.witness
    comp, alpha = v.compiler, v.compiler.P.alpha
    checked = 0
    for p, tr in run.runs.items():
        if tr.source in (core.ROOT, core.BOX):
            continue
        _, act, _, _, _ = comp.parts(tr.source)
        for i, q in enumerate(tr.targets):
            if q == core.BOX:
                continue
            for j in range(1, alpha + 1):
                if (act >> (j - 1)) & 1:
                    assert tree.nodes[p + (i,)][1][alpha + j - 1] == tree.nodes[p][1][j - 1]
                    checked += 1
    assert checked


@pytest.mark.parametrize("text", [
    "(sub top (some r B)) (sub B (all (inv r) A)) (instance a top)",
    "(instance a (some r (and (all (inv r) A) (some (inv r) B))))",
    "(sub top (some (inv r) (all r C))) (instance a (or C D))",
])
def test_back_propagation_closure(text):
    comp, bundles = alci_bundles(text)
    checked = 0
    for b in bundles:
        if b.source in (core.ROOT, core.BOX):
            continue
        t = comp.parts(b.source)[0]
        for opt in b.options:
            for q in opt:
                if q == core.BOX:
                    continue
                role, t2 = q[1], q[4]
                for r2, c in comp.info(t2)[0]:
                    if r2 == role.inverse:
                        assert comp.has(t, c)
                        checked += 1
    assert checked


@settings(max_examples=80, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(dl_ontologies(inverse=True))
def test_alci_matches_type_elimination(o):
    want = alci_consistent(o.tbox, [(x.ind, x.concept) for x in o.abox])
    assert core.check_consistency(o, D.DENSE, "alci", una=True).consistent == want


def test_alcof_examples():
    assert not consistent("(functional r) (instance a (and (some r A) (some r (not A))))", "alcof")
    two = "(related a b r) (related a c r) (instance b A) (instance c (not A))"
    assert not consistent("(functional r) " + two, "alcof")
    assert consistent(two, "alcof")
    assert consistent(two)
    assert consistent("(functional r) (instance a (and (some r A) (some r B)))", "alcof")
    assert consistent("(functional r) (related a b r) (related a c r) (instance b A) (instance c B)", "alcof")


def test_alcof_requires_its_logic():
    with pytest.raises(UnsupportedConstruct):
        consistent("(functional r) (instance a (some r A))")


def test_alcof_functional_argument():
    o = core.normalize(parse("(instance a (and (some r A) (some r (not A))))"))
    assert T.nonemptiness(ext.compile_automaton_alcof(o, D.DENSE)).nonempty
    assert not T.nonemptiness(ext.compile_automaton_alcof(o, D.DENSE, {"r"})).nonempty


def test_functional_closure():
    o = parse("(functional r) (related a b r) (related a c r)")
    assert not ext.functional_closure_ok(o, [["a"], ["b"], ["c"]])
    assert ext.functional_closure_ok(o, [["a"], ["b", "c"]])
    assert ext.functional_closure_ok(parse("(related a b r) (related a c r)"), [["a"], ["b"], ["c"]])


@pytest.mark.parametrize("text", [
    "(functional r) (instance a (and (some r A) (and (some r B) (some s C))))",
    "(functional r) (instance a (and (some r A) (cd-some ((v1 f) (v2 (r f)) (v3 (s g))) (lt v1 v2))))",
    "(functional r) (functional s) (instance a (and (some r A) (some s B)))",
])
def test_alcof_lambda(text):
    o = core.normalize(parse(text))
    P = core.derive_params(o, "alcof")
    for rn in o.functional:
        dirs = {i for e, i in P.lam.items() if core._entry_role(e) is not None and core._entry_role(e).name == rn}
        assert len(dirs) == 1
    other = [i for e, i in P.lam.items() if core._entry_role(e) is None or core._entry_role(e).name not in o.functional]
    assert len(other) == len(set(other))
    shared = {i for e, i in P.lam.items() if core._entry_role(e) is not None and core._entry_role(e).name in o.functional}
    assert not shared & set(other)


def test_constraint_assertion_examples():
    assert not consistent("(assert-constraint (lt (f a) (f a)))")
    assert not consistent("(assert-constraint (lt (f a) (f b))) (assert-constraint (lt (f b) (f a)))")
    assert consistent("(assert-constraint (lt (f a) (f b)))")
    v = core.check_consistency(parse("(assert-constraint (eqC 18 (age a)))"), D.DENSE_CONST, witness_depth=2)
    assert v.consistent
    tree, run = v.witness
    assert T.check_run_prefix(v.automaton, tree, run)
    assert tree.nodes[(0,)][1][v.compiler.P.feature_index("age") - 1] == Fraction(18)


def test_constraint_assertions_under_merges():
    # a and b may be the same element, which the strict order then forbids.
    text = "(instance a (nom b)) (assert-constraint (lt (f a) (f b)))"
    assert not consistent(text)
    assert consistent("(assert-constraint (lt (f a) (f b)))")


def test_compile_constraint_assertions():
    o = parse("(assert-constraint (lt (f a) (g b))) (instance c top)")
    parts, oblig = ext.compile_constraint_assertions(o)
    P = core.derive_params(core.normalize(o))
    assert parts == [Cn.lt(Cn.child(P.individual_index("a"), P.feature_index("f")),
                           Cn.child(P.individual_index("b"), P.feature_index("g")))]
    assert oblig == {"a": {"f"}, "b": {"g"}, "c": set()}
    with pytest.raises(UnknownFeature):
        P.feature_index("h")
    with pytest.raises(UnknownIndividual):
        P.individual_index("z")


BASE = "(instance a (cd-some ((v1 f) (v2 g)) (lt v1 v2))) (instance b (cd-all ((v1 f)) (lt v1 v1)))"
terms = st.sampled_from(["(f a)", "(g a)", "(f b)", "(g b)"])
assertions = st.lists(st.builds(lambda p, x, y: f"(assert-constraint ({p} {x} {y}))", st.sampled_from(["lt", "eq"]),
                                terms, terms), max_size=3)


@settings(max_examples=40, deadline=None)
@given(assertions)
def test_constraint_assertions_only_filter_roots(extra):
    def roots(text):
        comp = core.make_compiler(core.normalize(parse(text)), D.DENSE, "alco")
        return len(list(comp.root_choices())), comp.P

    n0, p0 = roots(BASE)
    n1, p1 = roots(BASE + " ".join(extra))
    assert (p1.alpha, p1.eta, p1.d, p1.beta) == (p0.alpha, p0.eta, p0.d, p0.beta)
    assert n1 <= n0


def test_corpus_logics():
    seen = {e.logic for e in ontologies()}
    assert seen == {"alco", "alci", "alcof"}
