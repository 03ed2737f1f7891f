"""Concrete domains: CSP decision, model construction and model extension.

Shipped domains:

* ``eq``: an infinite set with equality only; values are natural-number tags.
* ``dense``: the rationals with ``lt`` and ``eq``.
* ``dense-const``: ``dense`` plus unary ``eqC``/``ltC``/``gtC`` predicates that
  compare with an exact rational constant. ``(ltC q v)`` holds when v < q and
  ``(gtC q v)`` when v > q.

Values are exact: ints for ``eq``, :class:`fractions.Fraction` otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .constraints import EQ, LT, Literal, Predicate, format_rational, literal_key, restrict, system_vars, var_key
from .errors import ArityMismatch, DomainRejected, PreconditionViolated, UnknownDomain, UnknownPredicate


class Domain:
    id = "abstract"
    has_equality = True
    completion = True
    max_arity = 2
    # None means the signature is infinite and taken from occurrences.
    signature: tuple | None = ()

    def check(self, pred: Predicate):
        raise NotImplementedError

    def holds(self, pred: Predicate, vals) -> bool:
        raise NotImplementedError

    def satisfiable(self, lits: Iterable[Literal]) -> bool:
        raise NotImplementedError

    def model(self, lits: Iterable[Literal], pins: Mapping | None = None):
        """A satisfying valuation extending ``pins``, or None."""
        raise NotImplementedError

    def parse_value(self, tok: str):
        raise NotImplementedError

    def format_value(self, v) -> str:
        return str(v)

    def predicate_set(self, occurring: Iterable[Predicate]) -> tuple:
        """Predicates an automaton's type universe is built from."""
        occurring = set(occurring)
        for p in occurring:
            self.check(p)
        if self.signature is not None:
            return tuple(self.signature)
        from .constraints import pred_key

        return tuple(sorted(occurring, key=pred_key))

    def __repr__(self):
        return f"<domain {self.id}>"


def _check_literals(d: Domain, lits):
    lits = list(lits)
    for l in lits:
        d.check(l.atom.pred)
    return lits


# -- equality ----------------------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.up = {}

    def find(self, x):
        up = self.up
        root = x
        while up.get(root, root) != root:
            root = up[root]
        while x != root:
            nxt = up.get(x, x)
            up[x] = root
            x = nxt
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.up[ra] = rb
        return rb


def _equality_solve(lits, pins, want_model):
    uf = _UnionFind()
    diseq = []
    names = set(pins)
    for l in lits:
        a, b = l.atom.args
        names.add(a)
        names.add(b)
        if l.positive:
            uf.union(a, b)
        else:
            diseq.append((a, b))
    tag = {}
    for x in sorted(pins, key=var_key):
        r = uf.find(x)
        if r in tag and tag[r] != pins[x]:
            return False, None
        tag[r] = pins[x]
    for a, b in diseq:
        ra, rb = uf.find(a), uf.find(b)
        if ra == rb:
            return False, None
        if ra in tag and rb in tag and tag[ra] == tag[rb]:
            return False, None
    if not want_model:
        return True, None
    fresh = max(tag.values(), default=-1) + 1
    out = {}
    for x in sorted(names, key=var_key):
        r = uf.find(x)
        if r not in tag:
            tag[r] = fresh
            fresh += 1
        out[x] = tag[r]
    return True, out


def equality_decide(s: Iterable[Literal]) -> bool:
    lits = list(s)
    for l in lits:
        if l.atom.pred != EQ:
            raise UnknownPredicate(f"equality domain has no predicate {l.atom.pred}")
    return _equality_solve(lits, {}, False)[0]


class EqualityDomain(Domain):
    id = "eq"
    signature = (EQ,)

    def check(self, pred):
        if pred.name == "eq" and pred.param is None:
            if pred.arity != 2:
                raise ArityMismatch("eq is binary")
            return
        raise UnknownPredicate(f"domain eq has no predicate {pred}")

    def holds(self, pred, vals):
        self.check(pred)
        return vals[0] == vals[1]

    def satisfiable(self, lits):
        return _equality_solve(_check_literals(self, lits), {}, False)[0]

    def model(self, lits, pins=None):
        return _equality_solve(_check_literals(self, lits), dict(pins or {}), True)[1]

    def parse_value(self, tok):
        v = int(tok)
        if v < 0:
            raise ValueError("eq values are natural numbers")
        return v


# -- dense order -------------------------------------------------------------


def _scc(nodes, succ):
    """Iterative Tarjan; returns node -> component id, components in reverse topological order."""
    index, low, comp = {}, {}, {}
    on_stack = set()
    stack = []
    counter = 0
    ncomp = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp, ncomp


def _pick(lo, hi, used):
    if lo is None and hi is None:
        v = Fraction(0) if not used else max(used) + 1
        while v in used:
            v += 1
        return v
    if lo is None:
        v = hi - 1
        while v in used:
            v -= 1
        return v
    if hi is None:
        v = lo + 1
        while v in used:
            v += 1
        return v
    v = (lo + hi) / 2
    while v in used:
        v = (lo + v) / 2
    return v


def _dense_solve(lits, pins, want_model):
    """Graph decision for dense orders with optional constant predicates.

    ``lt(x,y)`` is a strict edge x->y, ``not lt(x,y)`` a weak edge y->x,
    ``eq`` merges classes, ``not eq`` records a disequality. Constants and
    pinned values become constant nodes chained by strict edges.
    """
    if want_model:
        # Models follow edge order, so fix it against set iteration order.
        lits = sorted(lits, key=literal_key)
        pins = dict(sorted(pins.items(), key=lambda kv: var_key(kv[0])))
    uf = _UnionFind()
    strict, weak, diseq = [], [], []
    names = set(pins)
    # Constant nodes are keyed by integers: Fraction hashes are recomputed on every lookup.
    const_val = {}

    def cnode(q):
        node = ("#const", q.numerator, q.denominator)
        if node not in const_val:
            const_val[node] = Fraction(q)
        return node

    for l in lits:
        p = l.atom.pred
        args = l.atom.args
        names.update(args)
        if p.param is None:
            a, b = args
            if p.name == "lt":
                (strict if l.positive else weak).append((a, b) if l.positive else (b, a))
            elif l.positive:
                uf.union(a, b)
            else:
                diseq.append((a, b))
            continue
        x, c = args[0], cnode(p.param)
        if p.name == "eqC":
            if l.positive:
                uf.union(x, c)
            else:
                diseq.append((x, c))
        elif p.name == "ltC":
            if l.positive:
                strict.append((x, c))
            else:
                weak.append((c, x))
        else:
            if l.positive:
                strict.append((c, x))
            else:
                weak.append((x, c))
    for x, q in pins.items():
        uf.union(x, cnode(q))
    ordered_consts = sorted(const_val, key=const_val.get)
    strict.extend(zip(ordered_consts, ordered_consts[1:]))

    pinned = {}
    for c in ordered_consts:
        q = const_val[c]
        r = uf.find(c)
        if r in pinned and pinned[r] != q:
            return False, None
        pinned[r] = q

    keyed = sorted(names, key=var_key) if want_model else list(names)
    nodes = []
    seen = set()
    for x in keyed + ordered_consts:
        r = uf.find(x)
        if r not in seen:
            seen.add(r)
            nodes.append(r)
    succ = {}
    edges = []
    for (a, b), is_strict in [(e, True) for e in strict] + [(e, False) for e in weak]:
        ra, rb = uf.find(a), uf.find(b)
        if ra == rb:
            if is_strict:
                return False, None
            continue
        succ.setdefault(ra, []).append(rb)
        edges.append((ra, rb, is_strict))
    comp, ncomp = _scc(nodes, succ)
    for ra, rb, is_strict in edges:
        if is_strict and comp[ra] == comp[rb]:
            return False, None
    for a, b in diseq:
        if comp[uf.find(a)] == comp[uf.find(b)]:
            return False, None
    comp_pin = {}
    for r, q in pinned.items():
        c = comp[r]
        if c in comp_pin and comp_pin[c] != q:
            return False, None
        comp_pin[c] = q
    if not want_model:
        return True, None

    # Components come out of Tarjan in reverse topological order.
    csucc = [set() for _ in range(ncomp)]
    cpred = [set() for _ in range(ncomp)]
    for ra, rb, _ in edges:
        ca, cb = comp[ra], comp[rb]
        if ca != cb:
            csucc[ca].add(cb)
            cpred[cb].add(ca)
    upper = [None] * ncomp
    for c in range(ncomp):
        best = comp_pin.get(c)
        for s in csucc[c]:
            u = upper[s]
            if u is not None and (best is None or u < best):
                best = u
        upper[c] = best
    value = [None] * ncomp
    used = set(comp_pin.values())
    for c in range(ncomp - 1, -1, -1):
        if c in comp_pin:
            value[c] = comp_pin[c]
            continue
        lo = None
        for p in cpred[c]:
            if lo is None or value[p] > lo:
                lo = value[p]
        hi = None
        for s in csucc[c]:
            u = upper[s]
            if u is not None and (hi is None or u < hi):
                hi = u
        v = _pick(lo, hi, used)
        used.add(v)
        value[c] = v
    return True, {x: value[comp[uf.find(x)]] for x in keyed}


def dense_order_decide(s: Iterable[Literal]) -> bool:
    lits = list(s)
    for l in lits:
        DENSE_CONST.check(l.atom.pred)
    return _dense_solve(lits, {}, False)[0]


class DenseDomain(Domain):
    id = "dense"
    signature = (EQ, LT)
    constants = False

    def check(self, pred):
        if pred.param is None and pred.name in ("lt", "eq"):
            if pred.arity != 2:
                raise ArityMismatch(f"{pred.name} is binary")
            return
        if self.constants and pred.name in ("eqC", "ltC", "gtC") and pred.param is not None:
            if pred.arity != 1:
                raise ArityMismatch(f"{pred.name} is unary")
            return
        raise UnknownPredicate(f"domain {self.id} has no predicate {pred}")

    def holds(self, pred, vals):
        self.check(pred)
        if pred.param is None:
            a, b = vals
            return a < b if pred.name == "lt" else a == b
        v, q = vals[0], pred.param
        if pred.name == "eqC":
            return v == q
        if pred.name == "ltC":
            return v < q
        return v > q

    def satisfiable(self, lits):
        return _dense_solve(_check_literals(self, lits), {}, False)[0]

    def model(self, lits, pins=None):
        return _dense_solve(_check_literals(self, lits), {x: Fraction(v) for x, v in (pins or {}).items()}, True)[1]

    def parse_value(self, tok):
        return Fraction(tok)

    def format_value(self, v):
        return format_rational(v)


class DenseConstDomain(DenseDomain):
    id = "dense-const"
    signature = None
    constants = True


EQUALITY = EqualityDomain()
DENSE = DenseDomain()
DENSE_CONST = DenseConstDomain()

_REGISTRY = {}


def register_domain(d: Domain):
    """Add a domain; domains without the completion property or equality are refused."""
    if not d.completion:
        raise DomainRejected(f"domain {d.id} lacks the completion property")
    if not d.has_equality:
        raise DomainRejected(f"domain {d.id} lacks equality")
    _REGISTRY[d.id] = d
    return d


for _d in (EQUALITY, DENSE, DENSE_CONST):
    register_domain(_d)


def get_domain(name: str) -> Domain:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise UnknownDomain(f"unknown domain {name!r}") from None


def domain_ids():
    return sorted(_REGISTRY)


# -- module-level operations -------------------------------------------------


def csp_satisfiable(d: Domain, s: Iterable[Literal]) -> bool:
    return d.satisfiable(s)


def solve_model(d: Domain, s: Iterable[Literal]):
    """A satisfying valuation of ``s`` or None when unsatisfiable."""
    return d.model(s)


def extend_model(d: Domain, s: Iterable[Literal], partial: Mapping):
    """Extend ``partial`` to a model of ``s``; relies on the completion property."""
    lits = list(s)
    known = set(partial)
    if not d.satisfiable(lits):
        raise PreconditionViolated("system is unsatisfiable")
    from .constraints import evaluate, literal_formula

    for l in restrict(lits, known):
        if not evaluate(literal_formula(l), partial, d):
            raise PreconditionViolated(f"partial valuation violates {l}")
    m = d.model(lits, {x: partial[x] for x in known})
    if m is None:
        raise PreconditionViolated("partial valuation has no extension")
    out = dict(partial)
    for x in system_vars(lits):
        out[x] = m[x]
    return out
