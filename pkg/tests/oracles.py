"""Brute-force reference implementations, written independently of the package.

They share only the data classes (atoms, literals, concepts) with the code
under test and never call its deciders.
"""

from fractions import Fraction
from itertools import product


# -- constraint systems -------------------------------------------------------


def weak_orderings(n):
    """Every map from n positions to ranks 0..k-1 that hits each rank (ordered set partitions)."""
    out = []
    for ranks in product(range(n), repeat=n):
        used = set(ranks)
        if used == set(range(len(used))):
            out.append(ranks)
    return out


def set_partitions(n):
    """Restricted growth strings of length n."""
    out = []

    def go(prefix, top):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for b in range(top + 2):
            go(prefix + [b], max(top, b))

    go([], -1)
    return out


def _holds_order(name, vals):
    if name == "lt":
        return vals[0] < vals[1]
    if name == "eq":
        return vals[0] == vals[1]
    raise ValueError(name)


def system_vars(lits):
    out = []
    for l in lits:
        for a in l.atom.args:
            if a not in out:
                out.append(a)
    return out


def dense_sat_oracle(lits):
    """Satisfiable over the rationals: order relations are fixed by a weak ordering, so try them all."""
    xs = system_vars(lits)
    for ranks in weak_orderings(len(xs)) or [()]:
        v = dict(zip(xs, ranks))
        if all(_holds_order(l.atom.pred.name, [v[a] for a in l.atom.args]) == l.positive for l in lits):
            return True
    return False


def equality_sat_oracle(lits):
    """Satisfiable over an infinite set: only the equality pattern matters, so try every partition."""
    xs = system_vars(lits)
    for blocks in set_partitions(len(xs)) or [()]:
        v = dict(zip(xs, blocks))
        if all((v[l.atom.args[0]] == v[l.atom.args[1]]) == l.positive for l in lits):
            return True
    return False


def const_dense_sat_oracle(lits):
    """Dense order with unary constant comparisons.

    Values range over the constants, midpoints between neighbouring
    constants and one point beyond each end; with ranks on top, every
    order type relative to the constants is tried.
    """
    xs = system_vars(lits)
    consts = sorted({l.atom.pred.param for l in lits if l.atom.pred.param is not None})
    points = []
    if consts:
        points.append(consts[0] - 1)
        for a, b in zip(consts, consts[1:]):
            points.append((a + b) / 2)
        points.append(consts[-1] + 1)
        points.extend(consts)
    else:
        points = [Fraction(0)]
    # Several variables may share a gap; spread them with small offsets.
    eps = Fraction(1, 1000)
    candidates = sorted({p + k * eps for p in points for k in range(-len(xs), len(xs) + 1)
                         if p not in consts or k == 0})
    for vals in product(candidates, repeat=len(xs)):
        v = dict(zip(xs, vals))
        ok = True
        for l in lits:
            p = l.atom.pred
            args = [v[a] for a in l.atom.args]
            if p.name == "eqC":
                t = args[0] == p.param
            elif p.name == "ltC":
                t = args[0] < p.param
            elif p.name == "gtC":
                t = args[0] > p.param
            else:
                t = _holds_order(p.name, args)
            if t != l.positive:
                ok = False
                break
        if ok:
            return True
    return False


# -- symbolic types -----------------------------------------------------------


def brute_force_types(sat, atoms):
    """Bit masks of every polarity assignment over ``atoms`` accepted by ``sat``."""
    from ctreed import constraints as C

    out = []
    for bits in range(1 << len(atoms)):
        lits = [C.Literal(a, bool((bits >> k) & 1)) for k, a in enumerate(atoms)]
        if sat(lits):
            out.append(bits)
    return out


# -- Büchi word automata ------------------------------------------------------


def lasso_nonempty(states, initial, accepting, edges):
    """d = 1: some initial state reaches an accepting state lying on a cycle."""
    succ = {q: set() for q in states}
    for s, t in edges:
        succ[s].add(t)

    def reach(srcs):
        seen = set(srcs)
        todo = list(srcs)
        while todo:
            q = todo.pop()
            for t in succ[q]:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
        return seen

    reachable = reach(initial)
    for f in accepting:
        if f in reachable and f in reach(succ[f]):
            return True
    return False


def looping_fixpoint(states, initial, transitions):
    """Greatest fixpoint: keep states having a transition whose targets all survive."""
    alive = set(states)
    changed = True
    while changed:
        changed = False
        for q in list(alive):
            if not any(s == q and all(t in alive for t in ts) for s, ts in transitions):
                alive.discard(q)
                changed = True
    return any(q in alive for q in initial)


# -- description logics ---------------------------------------------------------


def _nnf(c, neg=False):
    from ctreed.dl import syntax as S

    if isinstance(c, S.Not):
        return _nnf(c.arg, not neg)
    if isinstance(c, S.Top):
        return S.BOT if neg else S.TOP
    if isinstance(c, S.Bot):
        return S.TOP if neg else S.BOT
    if isinstance(c, S.Name):
        return S.NegName(c.name) if neg else c
    if isinstance(c, S.NegName):
        return S.Name(c.name) if neg else c
    if isinstance(c, S.And):
        parts = (_nnf(c.left, neg), _nnf(c.right, neg))
        return S.Or(*parts) if neg else S.And(*parts)
    if isinstance(c, S.Or):
        parts = (_nnf(c.left, neg), _nnf(c.right, neg))
        return S.And(*parts) if neg else S.Or(*parts)
    if isinstance(c, S.Exists):
        return S.Forall(c.role, _nnf(c.arg, neg)) if neg else S.Exists(c.role, _nnf(c.arg))
    if isinstance(c, S.Forall):
        return S.Exists(c.role, _nnf(c.arg, neg)) if neg else S.Forall(c.role, _nnf(c.arg))
    raise ValueError(f"oracle handles plain ALCI concepts only, got {c!r}")


def closure_counts(o):
    """(N_ex, N_cd, N_var, eta) by a direct walk over a normalized ontology."""
    from ctreed.dl import syntax as S

    seen, stack = set(), [rhs for _, rhs in o.tbox] + [x.concept for x in o.concept_assertions()]
    while stack:
        c = stack.pop()
        if c not in seen:
            seen.add(c)
            stack.extend(S.children(c))
    ex = sum(isinstance(c, S.Exists) for c in seen)
    cds = [c for c in seen if isinstance(c, S.CdExists)]
    return ex, len(cds), max([0] + [len(c.bindings) for c in cds]), len(o.individuals())


def alci_consistent(tbox, assertions):
    """Type elimination for ALCI without nominals, CD-restrictions or role assertions.

    ``tbox`` is a list of (C, D) inclusions and ``assertions`` a list of
    (individual, concept) pairs. Each individual needs its own surviving type.
    """
    from ctreed.dl import syntax as S

    gcis = [_nnf(S.Or(S.Not(l), r)) for l, r in tbox]
    asserted = {}
    for a, c in assertions:
        asserted.setdefault(a, []).append(_nnf(c))
    closure = set()
    stack = list(gcis) + [c for cs in asserted.values() for c in cs]
    while stack:
        c = stack.pop()
        if c in closure:
            continue
        closure.add(c)
        if isinstance(c, (S.And, S.Or)):
            stack += [c.left, c.right]
        elif isinstance(c, (S.Exists, S.Forall)):
            stack.append(c.arg)
        elif isinstance(c, S.Name):
            stack.append(S.NegName(c.name))
        elif isinstance(c, S.NegName):
            stack.append(S.Name(c.name))
    closure = sorted(closure, key=repr)
    names = sorted({c.name for c in closure if isinstance(c, S.Name)})

    # Truth values are free on names and modal concepts; Boolean ones are evaluated.
    # A set with exact Boolean members is a Hintikka set, and it survives elimination
    # whenever a looser Hintikka set with the same modal part does.
    modal = [c for c in closure if isinstance(c, (S.Exists, S.Forall))]

    def value(c, names_on, modal_on):
        if isinstance(c, S.Top):
            return True
        if isinstance(c, S.Bot):
            return False
        if isinstance(c, S.Name):
            return c.name in names_on
        if isinstance(c, S.NegName):
            return c.name not in names_on
        if isinstance(c, S.And):
            return value(c.left, names_on, modal_on) and value(c.right, names_on, modal_on)
        if isinstance(c, S.Or):
            return value(c.left, names_on, modal_on) or value(c.right, names_on, modal_on)
        return c in modal_on

    types = []
    for nbits in product([False, True], repeat=len(names)):
        names_on = {n for n, b in zip(names, nbits) if b}
        for mbits in product([False, True], repeat=len(modal)):
            modal_on = {c for c, b in zip(modal, mbits) if b}
            t = frozenset(c for c in closure if value(c, names_on, modal_on))
            if all(g in t for g in gcis):
                types.append(t)

    def compatible(t, role, u):
        for c in t:
            if isinstance(c, S.Forall) and c.role == role and c.arg not in u:
                return False
        for c in u:
            if isinstance(c, S.Forall) and c.role == role.inverse and c.arg not in t:
                return False
        return True

    alive = set(types)
    changed = True
    while changed:
        changed = False
        for t in list(alive):
            for c in t:
                if isinstance(c, S.Exists):
                    if not any(c.arg in u and compatible(t, c.role, u) for u in alive):
                        alive.discard(t)
                        changed = True
                        break
    for a, cs in asserted.items():
        if not any(all(c in t for c in cs) for t in alive):
            return False
    return True


def buchi_tree_fixpoint(states, initial, accepting, transitions):
    """Nested fixpoint nu Z. mu Y. (F and Pre(Z)) or Pre(Y), by plain set iteration."""

    def pre(s):
        return {q for q, ts in transitions if all(t in s for t in ts)}

    z = set(states)
    while True:
        y = set()
        while True:
            ny = (set(accepting) & pre(z)) | pre(y)
            if ny == y:
                break
            y = ny
        if y == z:
            break
        z = y
    return any(q in z for q in initial)
