"""Relational constraints over variables and automaton registers.

A constraint is a Boolean combination of predicate atoms. Raw CSP inputs use
named variables; automaton guards use registers. Both kinds live in the same
identifier space, so a single representation covers guards and systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .errors import ArityMismatch, NonInjectiveRename, UnboundVariable
from .sexpr import SList, Sym, fail


class _Interned:
    """Hash-consed immutable value: equal arguments give the identical object.

    Equality and hashing are by identity, which keeps the hot CSP loops cheap.
    Hash values differ between processes, so callers sort before printing.
    """

    __slots__ = ()
    _fields = ()

    def __new__(cls, *args):
        pool = cls.__dict__["_pool"]
        obj = pool.get(args)
        if obj is None:
            obj = object.__new__(cls)
            for name, value in zip(cls._fields, args):
                object.__setattr__(obj, name, value)
            pool[args] = obj
        return obj

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        return (type(self), tuple(getattr(self, f) for f in self._fields))

    def __repr__(self):
        args = ", ".join(repr(getattr(self, f)) for f in self._fields)
        return f"{type(self).__name__}({args})"


class Var(_Interned):
    __slots__ = ("name",)
    _fields = ("name",)
    _pool = {}

    def __new__(cls, name):
        return super().__new__(cls, name)

    def __str__(self):
        return self.name


class Reg(_Interned):
    """Register ``x<index>`` of the current node, of child ``child``, or of the parent."""

    __slots__ = ("index", "child", "parent")
    _fields = ("index", "child", "parent")
    _pool = {}

    def __new__(cls, index, child=None, parent=False):
        return super().__new__(cls, index, child, parent)

    def __str__(self):
        if self.parent:
            return f"x{self.index}.up"
        if self.child is None:
            return f"x{self.index}"
        return f"x{self.index}.{self.child}"


def current(j):
    return Reg(j)


def child(i, j):
    return Reg(j, i)


def parent(j):
    return Reg(j, None, True)


def var_key(v):
    """Total order on identifiers: registers by (node slot, index), then names."""
    if isinstance(v, Reg):
        slot = -1 if v.parent else (0 if v.child is None else v.child + 1)
        return (0, slot, v.index, "")
    return (1, 0, 0, v.name)


class Predicate(_Interned):
    __slots__ = ("name", "arity", "param")
    _fields = ("name", "arity", "param")
    _pool = {}

    def __new__(cls, name, arity, param=None):
        return super().__new__(cls, name, arity, None if param is None else Fraction(param))

    def __str__(self):
        if self.param is None:
            return self.name
        return f"{self.name}[{format_rational(self.param)}]"


LT = Predicate("lt", 2)
EQ = Predicate("eq", 2)


def pred_key(p):
    return (p.name, p.arity, p.param if p.param is not None else Fraction(0), p.param is None)


def literal_key(l):
    return (pred_key(l.atom.pred), tuple(var_key(a) for a in l.atom.args), l.positive)


def format_rational(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Atom(_Interned):
    __slots__ = ("pred", "args")
    _fields = ("pred", "args")
    _pool = {}

    def __new__(cls, pred, args):
        args = tuple(args)
        if len(args) != pred.arity:
            raise ArityMismatch(f"{pred} expects {pred.arity} arguments, got {len(args)}")
        return super().__new__(cls, pred, args)


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Truth:
    value: bool


TRUE = Truth(True)
FALSE = Truth(False)


def conj(items: Iterable) -> object:
    """Canonical conjunction: drops TRUE, collapses FALSE, empty is TRUE."""
    out = []
    for c in items:
        if c == TRUE:
            continue
        if c == FALSE:
            return FALSE
        if isinstance(c, And):
            out.extend(c.args)
        else:
            out.append(c)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(items: Iterable) -> object:
    """Canonical disjunction: drops FALSE, collapses TRUE, empty is FALSE."""
    out = []
    for c in items:
        if c == FALSE:
            continue
        if c == TRUE:
            return TRUE
        if isinstance(c, Or):
            out.extend(c.args)
        else:
            out.append(c)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def lt(a, b):
    return Atom(LT, (a, b))


def eq(a, b):
    return Atom(EQ, (a, b))


class Literal(_Interned):
    __slots__ = ("atom", "positive")
    _fields = ("atom", "positive")
    _pool = {}

    def __new__(cls, atom, positive=True):
        return super().__new__(cls, atom, bool(positive))

    def negated(self):
        return Literal(self.atom, not self.positive)

    def __str__(self):
        s = atom_sexpr(self.atom)
        return s if self.positive else f"(not {s})"


def pos(atom):
    return Literal(atom, True)


def neg(atom):
    return Literal(atom, False)


def literal_formula(lit: Literal):
    return lit.atom if lit.positive else Not(lit.atom)


def variables(theta) -> set:
    out = set()
    stack = [theta]
    while stack:
        c = stack.pop()
        if isinstance(c, Atom):
            out.update(c.args)
        elif isinstance(c, Not):
            stack.append(c.arg)
        elif isinstance(c, (And, Or)):
            stack.extend(c.args)
    return out


def atoms(theta) -> list:
    """Atoms of ``theta`` in left-to-right order, duplicates kept."""
    out = []

    def walk(c):
        if isinstance(c, Atom):
            out.append(c)
        elif isinstance(c, Not):
            walk(c.arg)
        elif isinstance(c, (And, Or)):
            for a in c.args:
                walk(a)

    walk(theta)
    return out


def predicates(theta) -> set:
    return {a.pred for a in atoms(theta)}


def size(theta) -> int:
    """Number of nodes in the syntax tree (atoms count one each)."""
    if isinstance(theta, Not):
        return 1 + size(theta.arg)
    if isinstance(theta, (And, Or)):
        return 1 + sum(size(a) for a in theta.args)
    return 1


def evaluate(theta, v: Mapping, domain) -> bool:
    if isinstance(theta, Truth):
        return theta.value
    if isinstance(theta, Atom):
        try:
            vals = [v[x] for x in theta.args]
        except KeyError as exc:
            raise UnboundVariable(f"no value for {exc.args[0]}") from None
        return domain.holds(theta.pred, vals)
    if isinstance(theta, Not):
        return not evaluate(theta.arg, v, domain)
    if isinstance(theta, And):
        return all(evaluate(a, v, domain) for a in theta.args)
    if isinstance(theta, Or):
        return any(evaluate(a, v, domain) for a in theta.args)
    raise TypeError(f"not a constraint: {theta!r}")


def nnf(theta):
    """Negation normal form: Not only directly above atoms."""
    if isinstance(theta, Not):
        return negate_nnf(theta.arg)
    if isinstance(theta, And):
        return conj(nnf(a) for a in theta.args)
    if isinstance(theta, Or):
        return disj(nnf(a) for a in theta.args)
    return theta


def negate_nnf(theta):
    if isinstance(theta, Truth):
        return FALSE if theta.value else TRUE
    if isinstance(theta, Atom):
        return Not(theta)
    if isinstance(theta, Not):
        return nnf(theta.arg)
    if isinstance(theta, And):
        return disj(negate_nnf(a) for a in theta.args)
    if isinstance(theta, Or):
        return conj(negate_nnf(a) for a in theta.args)
    raise TypeError(f"not a constraint: {theta!r}")


def substitute(theta, m: Mapping):
    """Replace variables by ``m`` without any injectivity requirement."""
    if isinstance(theta, Atom):
        return Atom(theta.pred, tuple(m.get(x, x) for x in theta.args))
    if isinstance(theta, Not):
        return Not(substitute(theta.arg, m))
    if isinstance(theta, And):
        return And(tuple(substitute(a, m) for a in theta.args))
    if isinstance(theta, Or):
        return Or(tuple(substitute(a, m) for a in theta.args))
    return theta


def rename(theta, m: Mapping):
    """Structural copy with variables renamed; ``m`` must be injective on vars(theta)."""
    vs = variables(theta)
    images = {}
    for x in vs:
        y = m.get(x, x)
        if y in images and images[y] != x:
            raise NonInjectiveRename(f"{images[y]} and {x} both map to {y}")
        images[y] = x
    return substitute(theta, m)


def rename_literals(lits: Iterable[Literal], m: Mapping) -> frozenset:
    return frozenset(Literal(Atom(l.atom.pred, tuple(m.get(x, x) for x in l.atom.args)), l.positive) for l in lits)


def system_vars(s: Iterable[Literal]) -> set:
    out = set()
    for l in s:
        out.update(l.atom.args)
    return out


def restrict(s: Iterable[Literal], xs) -> frozenset:
    xs = set(xs)
    return frozenset(l for l in s if all(x in xs for x in l.atom.args))


def is_complete(s: Iterable[Literal], preds, xs) -> bool:
    s = set(s)
    xs = set(xs)
    preds = set(preds)
    for l in s:
        if l.atom.pred not in preds or not all(x in xs for x in l.atom.args):
            return False
    ordered = sorted(xs, key=var_key)
    expected = 0
    for p in preds:
        for args in product(ordered, repeat=p.arity):
            a = Atom(p, args)
            has_pos, has_neg = pos(a) in s, neg(a) in s
            if has_pos == has_neg:
                return False
            expected += 1
    return len(s) == expected


def sort_literals(s: Iterable[Literal]) -> list:
    return sorted(s, key=lambda l: (pred_key(l.atom.pred), [var_key(x) for x in l.atom.args], l.positive))


# -- text syntax -------------------------------------------------------------

CONSTANT_PREDICATES = ("eqC", "ltC", "gtC")


def parse_rational(tok) -> Fraction:
    try:
        if "." in tok or "e" in tok.lower():
            raise ValueError
        return Fraction(str(tok))
    except (ValueError, ZeroDivisionError):
        fail(tok, f"expected an exact rational, got {tok!r}")


def parse_register(tok: str):
    """``x3`` / ``x3.1`` / ``x3.up`` to a register, else None."""
    if not tok.startswith("x"):
        return None
    head, _, tail = tok[1:].partition(".")
    if not head.isdigit() or int(head) < 1:
        return None
    j = int(head)
    if tail == "":
        return Reg(j) if "." not in tok else None
    if tail == "up":
        return Reg(j, None, True)
    if tail.isdigit():
        return Reg(j, int(tail))
    return None


def default_term(tok):
    if isinstance(tok, SList):
        fail(tok, "expected a variable")
    r = parse_register(tok)
    return r if r is not None else Var(str(tok))


def parse_constraint(form, term=default_term):
    """Read a constraint from a parsed S-expression; ``term`` maps argument forms to identifiers."""
    if isinstance(form, Sym):
        if form == "true":
            return TRUE
        if form == "false":
            return FALSE
        fail(form, f"unexpected atom {form!r} where a constraint was expected")
    if not form:
        fail(form, "empty form")
    head = form[0]
    if not isinstance(head, Sym):
        fail(form, "constraint operator must be a symbol")
    rest = form[1:]
    if head == "not":
        if len(rest) != 1:
            fail(form, "not takes one argument")
        return Not(parse_constraint(rest[0], term))
    if head == "and":
        return conj(parse_constraint(c, term) for c in rest)
    if head == "or":
        return disj(parse_constraint(c, term) for c in rest)
    if head in ("lt", "eq"):
        if len(rest) != 2:
            fail(form, f"{head} takes two arguments")
        return Atom(LT if head == "lt" else EQ, tuple(term(a) for a in rest))
    if head in CONSTANT_PREDICATES:
        if len(rest) != 2:
            fail(form, f"{head} takes a rational and one argument")
        q = parse_rational(rest[0])
        return Atom(Predicate(str(head), 1, q), (term(rest[1]),))
    if head == "p":
        if not rest or not isinstance(rest[0], Sym):
            fail(form, "p needs a predicate name")
        args = tuple(term(a) for a in rest[1:])
        return Atom(Predicate(str(rest[0]), len(args)), args)
    fail(head, f"unknown constraint operator {head!r}")


def atom_sexpr(a: Atom, show=str) -> str:
    p = a.pred
    args = " ".join(show(x) for x in a.args)
    if p.param is not None:
        return f"({p.name} {format_rational(p.param)} {args})"
    if p.name in ("lt", "eq") and p.arity == 2:
        return f"({p.name} {args})"
    return f"(p {p.name}{' ' + args if args else ''})"


def to_sexpr(theta, show=str) -> str:
    if isinstance(theta, Truth):
        return "true" if theta.value else "false"
    if isinstance(theta, Atom):
        return atom_sexpr(theta, show)
    if isinstance(theta, Not):
        return f"(not {to_sexpr(theta.arg, show)})"
    op = "and" if isinstance(theta, And) else "or"
    return f"({op} {' '.join(to_sexpr(a, show) for a in theta.args)})"
