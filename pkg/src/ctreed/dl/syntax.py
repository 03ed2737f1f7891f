"""Abstract syntax and reader for ontologies with concrete-domain restrictions.

Text format, one form per axiom::

    (domain dense)
    (sub C D)              ; GCI
    (instance a C)         ; concept assertion
    (related a b r)        ; role assertion, r may be (inv s)
    (functional r)
    (assert-constraint THETA)   ; THETA over terms (f a)

Concepts: ``top``, ``bot``, ``A``, ``(nom a)``, ``(not C)``, ``(and C D ...)``,
``(or C D ...)``, ``(some R C)``, ``(all R C)``, ``(cd-some ((v p) ...) THETA)``,
``(cd-all ((v p) ...) THETA)`` where a path ``p`` is a feature ``f`` or a pair
``(R f)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import constraints as C
from ..errors import DuplicateCdVariable, ParseError, UnboundVariable
from ..sexpr import SList, Sym, fail, read_all


@dataclass(frozen=True, order=True)
class Role:
    name: str
    inverted: bool = False

    @property
    def inverse(self) -> "Role":
        return Role(self.name, not self.inverted)

    def __str__(self):
        return f"(inv {self.name})" if self.inverted else self.name


@dataclass(frozen=True)
class Path:
    """A feature ``f`` read at the current element, or through one role step."""

    feature: str
    role: Role | None = None

    def __str__(self):
        return self.feature if self.role is None else f"({self.role} {self.feature})"


class Concept:
    __slots__ = ()

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class Top(Concept):
    pass


@dataclass(frozen=True)
class Bot(Concept):
    pass


@dataclass(frozen=True)
class Name(Concept):
    name: str


@dataclass(frozen=True)
class NegName(Concept):
    name: str


@dataclass(frozen=True)
class Nominal(Concept):
    ind: str


@dataclass(frozen=True)
class NegNominal(Concept):
    ind: str


@dataclass(frozen=True)
class Not(Concept):
    arg: Concept


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True)
class Exists(Concept):
    role: Role
    arg: Concept


@dataclass(frozen=True)
class Forall(Concept):
    role: Role
    arg: Concept


@dataclass(frozen=True)
class CdExists(Concept):
    bindings: tuple  # ((variable name, Path), ...)
    theta: object


@dataclass(frozen=True)
class CdForall(Concept):
    bindings: tuple
    theta: object


TOP = Top()
BOT = Bot()

CD_KINDS = (CdExists, CdForall)


def show(c) -> str:
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Bot):
        return "bot"
    if isinstance(c, Name):
        return c.name
    if isinstance(c, NegName):
        return f"(not {c.name})"
    if isinstance(c, Nominal):
        return f"(nom {c.ind})"
    if isinstance(c, NegNominal):
        return f"(not (nom {c.ind}))"
    if isinstance(c, Not):
        return f"(not {show(c.arg)})"
    if isinstance(c, And):
        return f"(and {show(c.left)} {show(c.right)})"
    if isinstance(c, Or):
        return f"(or {show(c.left)} {show(c.right)})"
    if isinstance(c, Exists):
        return f"(some {c.role} {show(c.arg)})"
    if isinstance(c, Forall):
        return f"(all {c.role} {show(c.arg)})"
    if isinstance(c, CD_KINDS):
        head = "cd-some" if isinstance(c, CdExists) else "cd-all"
        binds = " ".join(f"({v} {p})" for v, p in c.bindings)
        return f"({head} ({binds}) {C.to_sexpr(c.theta)})"
    raise TypeError(f"not a concept: {c!r}")


def children(c):
    if isinstance(c, Not):
        return (c.arg,)
    if isinstance(c, (And, Or)):
        return (c.left, c.right)
    if isinstance(c, (Exists, Forall)):
        return (c.arg,)
    return ()


def concept_roles(c) -> set:
    out = set()
    stack = [c]
    while stack:
        x = stack.pop()
        if isinstance(x, (Exists, Forall)):
            out.add(x.role)
        elif isinstance(x, CD_KINDS):
            out.update(p.role for _, p in x.bindings if p.role is not None)
        stack.extend(children(x))
    return out


def concept_features(c) -> set:
    out = set()
    stack = [c]
    while stack:
        x = stack.pop()
        if isinstance(x, CD_KINDS):
            out.update(p.feature for _, p in x.bindings)
        stack.extend(children(x))
    return out


def concept_nominals(c) -> set:
    out = set()
    stack = [c]
    while stack:
        x = stack.pop()
        if isinstance(x, (Nominal, NegNominal)):
            out.add(x.ind)
        stack.extend(children(x))
    return out


@dataclass(frozen=True)
class ConceptAssertion:
    ind: str
    concept: Concept


@dataclass(frozen=True)
class RoleAssertion:
    source: str
    target: str
    role: str


@dataclass(frozen=True)
class ConstraintAssertion:
    """``theta`` over variables named by ``bindings``: ((variable, feature, individual), ...)."""

    theta: object
    bindings: tuple


@dataclass
class Ontology:
    tbox: list = field(default_factory=list)  # (C, D) pairs meaning C is subsumed by D
    abox: list = field(default_factory=list)
    functional: frozenset = frozenset()
    domain: str | None = None
    normalized: bool = False

    def concept_assertions(self):
        return [x for x in self.abox if isinstance(x, ConceptAssertion)]

    def role_assertions(self):
        return [x for x in self.abox if isinstance(x, RoleAssertion)]

    def constraint_assertions(self):
        return [x for x in self.abox if isinstance(x, ConstraintAssertion)]

    def concepts(self):
        for lhs, rhs in self.tbox:
            yield lhs
            yield rhs
        for x in self.concept_assertions():
            yield x.concept

    def individuals(self) -> list:
        """Individual names in order of first occurrence in assertions, then nominals."""
        seen = {}
        for x in self.abox:
            if isinstance(x, ConceptAssertion):
                seen.setdefault(x.ind, None)
            elif isinstance(x, RoleAssertion):
                seen.setdefault(x.source, None)
                seen.setdefault(x.target, None)
            else:
                for _, _, a in x.bindings:
                    seen.setdefault(a, None)
        for c in self.concepts():
            for a in sorted(concept_nominals(c)):
                seen.setdefault(a, None)
        return list(seen)

    def features(self) -> list:
        out = set()
        for c in self.concepts():
            out |= concept_features(c)
        for x in self.constraint_assertions():
            out.update(f for _, f, _ in x.bindings)
        return sorted(out)

    def role_names(self) -> list:
        out = {r.name for c in self.concepts() for r in concept_roles(c)}
        return sorted(out)

    def uses_inverse(self) -> bool:
        return any(r.inverted for c in self.concepts() for r in concept_roles(c))

    def uses_nominals(self) -> bool:
        return any(concept_nominals(c) for c in self.concepts())


def size(o: Ontology) -> int:
    """Number of concept occurrences plus constraint sizes over the whole ontology."""
    total = 0
    for c in o.concepts():
        stack = [c]
        while stack:
            x = stack.pop()
            total += 1
            if isinstance(x, CD_KINDS):
                total += C.size(x.theta)
            stack.extend(children(x))
    for x in o.constraint_assertions():
        total += C.size(x.theta)
    return total


# -- reader ------------------------------------------------------------------


def _sym(form, what):
    if not isinstance(form, Sym):
        fail(form, f"expected {what}")
    return str(form)


def parse_role(form) -> Role:
    if isinstance(form, Sym):
        return Role(str(form))
    if isinstance(form, SList) and len(form) == 2 and form[0] == "inv":
        inner = parse_role(form[1])
        return inner.inverse
    fail(form, "expected a role name or (inv r)")


def parse_path(form) -> Path:
    if isinstance(form, Sym):
        return Path(str(form))
    if isinstance(form, SList) and len(form) == 2 and not (isinstance(form[0], Sym) and form[0] == "inv"):
        return Path(_sym(form[1], "a feature name"), parse_role(form[0]))
    if isinstance(form, SList) and len(form) > 2:
        fail(form, "role paths with more than one role are not supported")
    fail(form, "expected a feature or (role feature)")


def _bound_term(names, form):
    def term(tok):
        if isinstance(tok, SList):
            fail(tok, "expected a bound variable")
        if str(tok) not in names:
            line, col = getattr(tok, "line", None), getattr(tok, "col", None)
            raise UnboundVariable(f"variable {tok} is not bound by the restriction at line {line}, column {col}")
        return C.Var(str(tok))

    return term


def parse_concept(form) -> Concept:
    if isinstance(form, Sym):
        if form == "top":
            return TOP
        if form == "bot":
            return BOT
        return Name(str(form))
    if not isinstance(form, SList) or not form:
        fail(form, "expected a concept")
    head = form[0]
    if not isinstance(head, Sym):
        fail(form, "concept operator must be a symbol")
    rest = form[1:]
    if head == "nom":
        if len(rest) != 1:
            fail(form, "nom takes one individual")
        return Nominal(_sym(rest[0], "an individual"))
    if head == "not":
        if len(rest) != 1:
            fail(form, "not takes one concept")
        return Not(parse_concept(rest[0]))
    if head in ("and", "or"):
        if len(rest) < 2:
            fail(form, f"{head} takes at least two concepts")
        parts = [parse_concept(c) for c in rest]
        out = parts[0]
        for p in parts[1:]:
            out = And(out, p) if head == "and" else Or(out, p)
        return out
    if head in ("some", "all"):
        if len(rest) != 2:
            fail(form, f"{head} takes a role and a concept")
        r = parse_role(rest[0])
        c = parse_concept(rest[1])
        return Exists(r, c) if head == "some" else Forall(r, c)
    if head in ("cd-some", "cd-all"):
        if len(rest) != 2 or not isinstance(rest[0], SList) or not rest[0]:
            fail(form, f"{head} takes a nonempty binding list and a constraint")
        binds = []
        names = set()
        for b in rest[0]:
            if not isinstance(b, SList) or len(b) != 2:
                fail(b, "a binding is (variable path)")
            v = _sym(b[0], "a variable name")
            if v in names:
                line, col = b.line, b.col
                raise DuplicateCdVariable(f"variable {v} bound twice at line {line}, column {col}")
            names.add(v)
            binds.append((v, parse_path(b[1])))
        theta = C.parse_constraint(rest[1], _bound_term(names, rest[1]))
        return (CdExists if head == "cd-some" else CdForall)(tuple(binds), theta)
    fail(head, f"unknown concept operator {head!r}")


def _assertion_term(bindings):
    def term(tok):
        if not (isinstance(tok, SList) and len(tok) == 2 and all(isinstance(x, Sym) for x in tok)):
            fail(tok, "expected a term (feature individual)")
        f, a = str(tok[0]), str(tok[1])
        v = C.Var(f"{f}({a})")
        if (v.name, f, a) not in bindings:
            bindings.append((v.name, f, a))
        return v

    return term


def parse_ontology(text: str) -> Ontology:
    o = Ontology()
    functional = set()
    for form in read_all(text):
        if not isinstance(form, SList) or not form or not isinstance(form[0], Sym):
            fail(form, "expected an axiom form")
        head, rest = form[0], form[1:]
        if head == "domain":
            if len(rest) != 1:
                fail(form, "domain takes one identifier")
            o.domain = _sym(rest[0], "a domain identifier")
        elif head == "sub":
            if len(rest) != 2:
                fail(form, "sub takes two concepts")
            o.tbox.append((parse_concept(rest[0]), parse_concept(rest[1])))
        elif head == "instance":
            if len(rest) != 2:
                fail(form, "instance takes an individual and a concept")
            o.abox.append(ConceptAssertion(_sym(rest[0], "an individual"), parse_concept(rest[1])))
        elif head == "related":
            if len(rest) != 3:
                fail(form, "related takes two individuals and a role")
            a, b = _sym(rest[0], "an individual"), _sym(rest[1], "an individual")
            r = parse_role(rest[2])
            # (a, b) : inv r is stored as (b, a) : r.
            o.abox.append(RoleAssertion(b, a, r.name) if r.inverted else RoleAssertion(a, b, r.name))
        elif head == "functional":
            if len(rest) != 1:
                fail(form, "functional takes one role name")
            functional.add(_sym(rest[0], "a role name"))
        elif head == "assert-constraint":
            if len(rest) != 1:
                fail(form, "assert-constraint takes one constraint")
            binds = []
            theta = C.parse_constraint(rest[0], _assertion_term(binds))
            o.abox.append(ConstraintAssertion(theta, tuple(binds)))
        else:
            fail(head, f"unknown axiom {head!r}")
    o.functional = frozenset(functional)
    return o


def format_ontology(o: Ontology) -> str:
    lines = []
    if o.domain:
        lines.append(f"(domain {o.domain})")
    for r in sorted(o.functional):
        lines.append(f"(functional {r})")
    for lhs, rhs in o.tbox:
        lines.append(f"(sub {show(lhs)} {show(rhs)})")
    for x in o.abox:
        if isinstance(x, ConceptAssertion):
            lines.append(f"(instance {x.ind} {show(x.concept)})")
        elif isinstance(x, RoleAssertion):
            lines.append(f"(related {x.source} {x.target} {x.role})")
        else:
            terms = {v: f"({f} {a})" for v, f, a in x.bindings}
            lines.append(f"(assert-constraint {C.to_sexpr(x.theta, lambda v: terms.get(v.name, str(v)))})")
    return "\n".join(lines) + "\n"


__all__ = [
    "And", "Bot", "CdExists", "CdForall", "Concept", "ConceptAssertion", "ConstraintAssertion", "Exists",
    "Forall", "Name", "NegName", "NegNominal", "Nominal", "Not", "Ontology", "Or", "ParseError", "Path",
    "Role", "RoleAssertion", "Top", "BOT", "TOP", "format_ontology", "parse_concept", "parse_ontology",
    "parse_path", "parse_role", "show", "size",
]
