"""Tree global constraint automata: runs, nonemptiness, witnesses and statistics.

A TGCA reads full infinite ``d``-ary trees whose nodes carry a letter and a
``beta``-tuple of domain values. Each transition carries a guard relating the
registers of a node to those of its children (siblings included).

Transitions are stored as *bundles*: a bundle fixes source, letter and guard
and gives, per direction, a set of admissible target locations. It stands for
the product of those sets. Hand-written automata use singleton sets.

Nonemptiness is decided by reduction to a Büchi game. Two reductions are
available and give the same verdicts:

* ``"types"`` pairs locations with full symbolic types of the node and its
  children, then solves the resulting tree automaton.
* ``"local"`` (the default) pairs locations with types over the node's own
  registers only. A move from (q, s) picks a bundle and child local types
  such that s, the renamed child types and the guard are jointly
  satisfiable. This describes the same trees, because any model of that
  joint system induces a full type that is projection-compatible with the
  child types, and it avoids building the much larger full-type product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from . import constraints as C
from .bta import Arena, Bta, BtaTransition, Empty, Nonempty, buchi_nonemptiness, looping_nonemptiness, solve_buchi, solve_safety
from .domains import get_domain
from .errors import BudgetExceeded, CapabilityMissing, InternalInconsistency, InvalidAutomaton, PreconditionViolated, ShapeMismatch
from .sexpr import SList, Sym, fail, read_all
from .symtypes import (
    DEFAULT_ATOM_CAP,
    DEFAULT_TYPE_BUDGET,
    atom_universe,
    child_key,
    current_key,
    entails,
    satisfiable_types,
    universe_size,
)

DEFAULT_TRANSITION_CAP = 1_000_000
DEFAULT_WITNESS_DEPTH = 3


@dataclass(frozen=True)
class Transition:
    source: object
    letter: str
    guard: object
    targets: tuple


@dataclass(frozen=True)
class Bundle:
    source: object
    letter: str
    guard: object
    options: tuple

    def size(self):
        n = 1
        for o in self.options:
            n *= len(o)
        return n

    def expand(self):
        for targets in product(*self.options):
            yield Transition(self.source, self.letter, self.guard, targets)


def bundle_of(t: Transition) -> Bundle:
    return Bundle(t.source, t.letter, t.guard, tuple((q,) for q in t.targets))


@dataclass
class Tgca:
    locations: tuple
    alphabet: tuple
    degree: int
    beta: int
    initial: frozenset
    accepting: frozenset
    bundles: tuple
    domain: object
    # Registers ``x<j>.up`` refer to ``x<parent_offset + j>``; None forbids them.
    parent_offset: int | None = None
    names: dict | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_transitions(cls, locations, alphabet, degree, beta, initial, accepting, transitions, domain, **kw):
        return cls(tuple(locations), tuple(alphabet), degree, beta, frozenset(initial), frozenset(accepting),
                   tuple(bundle_of(t) for t in transitions), domain, **kw)

    def transitions(self):
        for b in self.bundles:
            yield from b.expand()

    def transition_count(self):
        return sum(b.size() for b in self.bundles)

    def name(self, q):
        if self.names is not None and q in self.names:
            return self.names[q]
        return str(q)

    def location_index(self):
        if "lidx" not in self._cache:
            self._cache["lidx"] = {q: k for k, q in enumerate(self.locations)}
        return self._cache["lidx"]

    def resolve(self, guard):
        if self.parent_offset is None:
            return guard
        off = self.parent_offset
        regs = {r: C.current(off + r.index) for r in C.variables(guard) if isinstance(r, C.Reg) and r.parent}
        return C.substitute(guard, regs) if regs else guard

    def resolved_bundles(self):
        if "rb" not in self._cache:
            self._cache["rb"] = tuple(
                Bundle(b.source, b.letter, self.resolve(b.guard), b.options) for b in self.bundles)
        return self._cache["rb"]

    def predicate_set(self):
        occurring = set()
        for b in self.bundles:
            occurring |= C.predicates(b.guard)
        return self.domain.predicate_set(occurring)

    def is_looping(self):
        return set(self.accepting) == set(self.locations)


# -- validation ----------------------------------------------------------------


def validate(a: Tgca) -> list:
    """Structural defects; an empty list means the automaton is well formed."""
    defects = []
    if a.degree < 1:
        defects.append(f"degree {a.degree} must be at least 1")
    if a.beta < 0:
        defects.append("negative register count")
    locs = set(a.locations)
    if len(locs) != len(a.locations):
        defects.append("duplicate locations")
    for q in sorted(a.initial - locs, key=str):
        defects.append(f"initial location {q} is not a location")
    for q in sorted(a.accepting - locs, key=str):
        defects.append(f"accepting location {q} is not a location")
    for k, b in enumerate(a.bundles):
        where = f"transition {k}"
        if b.source not in locs:
            defects.append(f"{where}: source {b.source} is not a location")
        if b.letter not in a.alphabet:
            defects.append(f"{where}: letter {b.letter} is not in the alphabet")
        if len(b.options) != a.degree:
            defects.append(f"{where}: {len(b.options)} targets for degree {a.degree}")
        for opt in b.options:
            if not opt:
                defects.append(f"{where}: empty target set")
            for q in opt:
                if q not in locs:
                    defects.append(f"{where}: target {q} is not a location")
        for x in sorted(C.variables(b.guard), key=C.var_key):
            if not isinstance(x, C.Reg):
                defects.append(f"{where}: free variable {x} in guard")
                continue
            if x.parent:
                if a.parent_offset is None:
                    defects.append(f"{where}: parent register {x} in an automaton without parent copies")
                elif not 1 <= a.parent_offset + x.index <= a.beta:
                    defects.append(f"{where}: parent register {x} out of range")
                continue
            if x.child is not None and not 0 <= x.child < a.degree:
                defects.append(f"{where}: direction out of range in {x}")
            if not 1 <= x.index <= a.beta:
                defects.append(f"{where}: register index out of range in {x}")
        for p in sorted(C.predicates(b.guard), key=C.pred_key):
            try:
                a.domain.check(p)
            except Exception as exc:
                defects.append(f"{where}: {exc}")
    return defects


def require_valid(a: Tgca):
    defects = validate(a)
    if defects:
        raise InvalidAutomaton(defects[0])


# -- run prefixes --------------------------------------------------------------


@dataclass
class DataTreePrefix:
    depth: int
    degree: int
    beta: int
    nodes: dict  # path tuple -> (letter, values tuple)


@dataclass
class RunPrefix:
    runs: dict  # path tuple -> Transition


def tree_paths(degree, depth):
    level = [()]
    out = [()]
    for _ in range(depth):
        level = [p + (i,) for p in level for i in range(degree)]
        out.extend(level)
    return out


def _valuation(a, t, path):
    val = {}
    letter, z = t.nodes[path]
    for j in range(1, a.beta + 1):
        val[C.current(j)] = z[j - 1]
        for i in range(a.degree):
            val[C.child(i, j)] = t.nodes[path + (i,)][1][j - 1]
    return val


def _membership_index(a):
    if "member" not in a._cache:
        idx = {}
        for b in a.bundles:
            idx.setdefault((b.source, b.letter, b.guard), []).append([set(o) for o in b.options])
        a._cache["member"] = idx
    return a._cache["member"]


def is_transition_of(a: Tgca, t: Transition) -> bool:
    for opts in _membership_index(a).get((t.source, t.letter, t.guard), ()):
        if all(q in o for q, o in zip(t.targets, opts)) and len(t.targets) == len(opts):
            return True
    return False


def check_run_prefix(a: Tgca, t: DataTreePrefix, r: RunPrefix) -> bool:
    """Run conditions on a finite prefix; Büchi acceptance is not checkable here."""
    paths = tree_paths(a.degree, t.depth)
    for p in paths:
        if p not in t.nodes or len(t.nodes[p][1]) != a.beta:
            raise ShapeMismatch(f"data tree prefix lacks node {p} or has the wrong width")
    inner = [p for p in paths if len(p) < t.depth]
    for p in inner:
        if p not in r.runs:
            raise ShapeMismatch(f"run prefix lacks node {p}")
    if not inner:
        return True
    if r.runs[()].source not in a.initial:
        return False
    for p in inner:
        tr = r.runs[p]
        if not is_transition_of(a, tr):
            return False
        if tr.letter != t.nodes[p][0]:
            return False
        for i in range(a.degree):
            q = p + (i,)
            if q in r.runs and r.runs[q].source != tr.targets[i]:
                return False
        if not C.evaluate(a.resolve(tr.guard), _valuation(a, t, p), a.domain):
            return False
    return True


# -- reductions ----------------------------------------------------------------


@dataclass
class Move:
    transition: Transition
    children: tuple
    system: frozenset  # literals over the registers of a node and its children


@dataclass
class Certificate:
    """A memoryless winning strategy restricted to the states it reaches."""

    root: object
    moves: dict
    method: str
    arena_states: int = 0


def reduce_to_bta(a: Tgca, max_atoms=DEFAULT_ATOM_CAP, max_types=DEFAULT_TYPE_BUDGET,
                  max_transitions=DEFAULT_TRANSITION_CAP, types=None):
    """Product with full symbolic types.

    Returns (bta, decode, origin): ``decode[s] = (location, type)`` for BTA
    state ``s`` and ``origin[k]`` is the TGCA transition behind BTA
    transition ``k``.
    """
    require_valid(a)
    if types is None:
        u = atom_universe(a.predicate_set(), a.beta, a.degree, max_atoms)
        types = satisfiable_types(a.domain, u, max_types)
    nt = len(types)
    lidx = a.location_index()
    decode = [(q, tau) for q in a.locations for tau in types]
    by_cur = {}
    for k, tau in enumerate(types):
        by_cur.setdefault(current_key(tau), []).append(k)
    trans, origin = [], []
    for orig, b in zip(a.bundles, a.resolved_bundles()):
        for k, tau in enumerate(types):
            if not entails(tau, b.guard):
                continue
            cands = []
            for i in range(a.degree):
                ks = by_cur.get(child_key(tau, i), [])
                cands.append([(q, kk) for q in b.options[i] for kk in ks])
            src = lidx[b.source] * nt + k
            for combo in product(*cands):
                if len(trans) >= max_transitions:
                    raise BudgetExceeded(f"more than {max_transitions} BTA transitions")
                trans.append(BtaTransition(src, b.letter, tuple(lidx[q] * nt + kk for q, kk in combo)))
                origin.append(Transition(b.source, b.letter, orig.guard, tuple(q for q, _ in combo)))
    states = tuple(range(len(decode)))
    initial = frozenset(lidx[q] * nt + k for q in a.initial for k in range(nt))
    accepting = frozenset(lidx[q] * nt + k for q in a.accepting for k in range(nt))
    bta = Bta(states, tuple(a.alphabet), a.degree, initial, accepting, tuple(trans))
    return bta, decode, origin


def satisfying_branch(domain, base, theta):
    """Literals of one satisfiable branch of ``base`` plus ``theta`` (in NNF), or None."""
    theta = C.nnf(theta)

    def go(lits, pending):
        while pending:
            f = pending.pop()
            if isinstance(f, C.Truth):
                if not f.value:
                    return None
            elif isinstance(f, C.Atom):
                lits.append(C.Literal(f, True))
            elif isinstance(f, C.Not):
                lits.append(C.Literal(f.arg, False))
            elif isinstance(f, C.And):
                pending.extend(f.args)
            else:
                if not domain.satisfiable(lits):
                    return None
                for c in f.args:
                    found = go(list(lits), pending + [c])
                    if found is not None:
                        return found
                return None
        return lits if domain.satisfiable(lits) else None

    return go(list(base), [theta])


class LocalArena:
    """Game over (location, local type) pairs; see the module docstring."""

    def __init__(self, a: Tgca, max_atoms=DEFAULT_ATOM_CAP, max_types=DEFAULT_TYPE_BUDGET,
                 max_transitions=DEFAULT_TRANSITION_CAP):
        require_valid(a)
        self.a = a
        dom = a.domain
        lu = atom_universe(a.predicate_set(), a.beta, 0, max_atoms)
        self.local_types = satisfiable_types(dom, lu, max_types)
        nl = self.nl = len(self.local_types)
        self.own = [tau.literals() for tau in self.local_types]
        self._renamed = {}
        lidx = a.location_index()
        self.arena = Arena(len(a.locations) * nl)
        self.meta = [[] for _ in range(self.arena.n)]
        groups = {}

        def intern(g):
            return groups.setdefault(g, g)

        budget = max_transitions
        for orig, b in zip(a.bundles, a.resolved_bundles()):
            mentioned = sorted({x.child for x in C.variables(b.guard) if x.child is not None})
            uses_current = any(x.child is None for x in C.variables(b.guard))
            free = {}
            for i in range(a.degree):
                if i not in mentioned:
                    free[i] = intern(tuple(lidx[q] * nl + s for q in b.options[i] for s in range(nl)))
            shared = None if uses_current else self._combos(b.guard, None, mentioned)
            src = lidx[b.source]
            for s in range(nl):
                combos = shared if shared is not None else self._combos(b.guard, s, mentioned)
                for combo in combos:
                    chosen = dict(zip(mentioned, combo))
                    opt = tuple(
                        intern(tuple(lidx[q] * nl + chosen[i] for q in b.options[i])) if i in chosen else free[i]
                        for i in range(a.degree))
                    budget -= 1
                    if budget < 0:
                        raise BudgetExceeded(f"more than {max_transitions} arena moves")
                    self.arena.add(src * nl + s, opt)
                    self.meta[src * nl + s].append((orig, b.guard))

    def child_lits(self, i, s):
        key = (i, s)
        if key not in self._renamed:
            m = {C.current(j): C.child(i, j) for j in range(1, self.a.beta + 1)}
            self._renamed[key] = C.rename_literals(self.own[s], m)
        return self._renamed[key]

    def _combos(self, guard, s, mentioned):
        dom = self.a.domain
        base = list(self.own[s]) if s is not None else []
        out = []

        def go(k, lits, picked):
            if satisfying_branch(dom, lits, guard) is None:
                return
            if k == len(mentioned):
                out.append(tuple(picked))
                return
            i = mentioned[k]
            for t in range(self.nl):
                go(k + 1, lits + list(self.child_lits(i, t)), picked + [t])

        go(0, base, [])
        return out

    def decode(self, state):
        return self.a.locations[state // self.nl], state % self.nl

    def move(self, state, option, members):
        a = self.a
        b, guard = self.meta[state][option]
        _, s = self.decode(state)
        targets = tuple(self.decode(m)[0] for m in members)
        lits = list(self.own[s])
        for i, m in enumerate(members):
            lits.extend(self.child_lits(i, self.decode(m)[1]))
        branch = satisfying_branch(a.domain, lits, guard)
        if branch is None:
            raise InternalInconsistency("a winning move has an unsatisfiable guard")
        return Move(Transition(b.source, b.letter, b.guard, targets), tuple(members), frozenset(branch))


def _reachable_moves(root, step):
    moves = {}
    todo = [root]
    while todo:
        s = todo.pop()
        if s in moves:
            continue
        mv = step(s)
        moves[s] = mv
        todo.extend(c for c in mv.children if c not in moves)
    return moves


def nonemptiness(a: Tgca, method="local", max_atoms=DEFAULT_ATOM_CAP, max_types=DEFAULT_TYPE_BUDGET,
                 max_transitions=DEFAULT_TRANSITION_CAP):
    """Empty() or Nonempty(certificate, root state)."""
    if method == "types":
        bta, decode, origin = reduce_to_bta(a, max_atoms, max_types, max_transitions)
        res = looping_nonemptiness(bta) if a.is_looping() else buchi_nonemptiness(bta)
        if not res.nonempty:
            return Empty()
        choice = res.strategy.choice

        def step(s):
            k = choice[s]
            tau = decode[s][1]
            return Move(origin[k], bta.transitions[k].targets, tau.literals())

        cert = Certificate(res.initial, _reachable_moves(res.initial, step), "types", len(bta.states))
        return Nonempty(cert, res.initial)
    if method != "local":
        raise ValueError(f"unknown method {method!r}")
    la = LocalArena(a, max_atoms, max_types, max_transitions)
    n = la.arena.n
    if a.is_looping():
        win, choice = solve_safety(la.arena)
    else:
        acc = [la.decode(s)[0] in a.accepting for s in range(n)]
        win, choice = solve_buchi(la.arena, acc)
    lidx = a.location_index()
    root = None
    for q in sorted(a.initial, key=lidx.__getitem__):
        for s in range(la.nl):
            st = lidx[q] * la.nl + s
            if win[st]:
                root = st
                break
        if root is not None:
            break
    if root is None:
        return Empty()

    def step(s):
        o, members = choice[s]
        return la.move(s, o, members)

    cert = Certificate(root, _reachable_moves(root, step), "local", n)
    cert.local_types = la.local_types
    return Nonempty(cert, root)


def _node_var(path, j):
    return C.Var(f"v{j}_{'.'.join(map(str, path)) if path else 'e'}")


def concretize_witness(a: Tgca, result, depth=DEFAULT_WITNESS_DEPTH):
    """Unfold a certificate breadth-first, extending values node by node.

    Each node's system is its move's literal set with registers renamed to
    per-node variables. The node's own values are already fixed by its
    parent, and they satisfy the restricted system, so the completion
    property lets the values of the children be chosen.
    """
    dom = a.domain
    if not dom.completion:
        raise CapabilityMissing(f"domain {dom.id} lacks the completion property")
    cert = result.strategy
    nodes, runs = {}, {}
    assigned = {(): ()}
    level = [((), cert.root)]
    for lev in range(depth + 1):
        nxt = []
        for path, s in level:
            mv = cert.moves[s]
            m = {}
            for j in range(1, a.beta + 1):
                m[C.current(j)] = _node_var(path, j)
                for i in range(a.degree):
                    m[C.child(i, j)] = _node_var(path + (i,), j)
            system = C.rename_literals(mv.system, m)
            partial = {}
            if path != () or assigned[()]:
                partial = {_node_var(path, j): assigned[path][j - 1] for j in range(1, a.beta + 1)}
            if lev < depth or path == ():
                try:
                    full = _extend(dom, system, partial)
                except PreconditionViolated as exc:
                    raise InternalInconsistency(f"witness extension failed at node {path}: {exc}") from None
                own = tuple(full.get(_node_var(path, j), _any_value(dom)) for j in range(1, a.beta + 1))
                if path == ():
                    assigned[()] = own
                if lev < depth:
                    for i in range(a.degree):
                        q = path + (i,)
                        assigned[q] = tuple(full.get(_node_var(q, j), _any_value(dom)) for j in range(1, a.beta + 1))
                        nxt.append((q, mv.children[i]))
                    runs[path] = mv.transition
            nodes[path] = (mv.transition.letter, assigned[path])
        level = nxt
    return DataTreePrefix(depth, a.degree, a.beta, nodes), RunPrefix(runs)


def _extend(dom, system, partial):
    from .domains import extend_model

    return extend_model(dom, system, partial)


def _any_value(dom):
    return dom.parse_value("0")


# -- statistics ----------------------------------------------------------------


@dataclass
class StatsReport:
    m: int
    beta: int
    d: int
    k0: int
    locations: int
    transitions: int
    max_constraint_size: int
    atoms: int
    atom_bound: int
    local_types: int | None = None
    sat_types: int | None = None
    bta_states: int | None = None
    bta_transitions: int | None = None

    def bound_holds(self):
        return self.atoms <= self.atom_bound

    def items(self):
        show = lambda v: "n/a" if v is None else str(v)
        return [
            ("m", show(self.m)), ("beta", show(self.beta)), ("d", show(self.d)), ("k0", show(self.k0)),
            ("locations", show(self.locations)), ("transitions", show(self.transitions)),
            ("maxconstraintsize", show(self.max_constraint_size)), ("atoms", show(self.atoms)),
            ("atom_bound", show(self.atom_bound)), ("local_types", show(self.local_types)),
            ("sat_types", show(self.sat_types)), ("bta_states", show(self.bta_states)),
            ("bta_transitions", show(self.bta_transitions)),
        ]


def stats(a: Tgca, enumerate_types=True, max_atoms=DEFAULT_ATOM_CAP, max_types=DEFAULT_TYPE_BUDGET,
          max_work=2_000_000) -> StatsReport:
    """Size parameters of ``a`` and, optionally, of its full-type reduction.

    Enumeration results that exceed the caps are reported as unavailable.
    """
    preds = a.predicate_set()
    m = len(preds)
    k0 = a.domain.max_arity
    n_atoms = universe_size(preds, a.beta, a.degree)
    bound = m * (a.beta * (a.degree + 1)) ** k0
    if n_atoms > bound:
        raise InternalInconsistency(f"atom count {n_atoms} exceeds the bound {bound}")
    rep = StatsReport(m, a.beta, a.degree, k0, len(a.locations), a.transition_count(),
                      max((C.size(b.guard) for b in a.bundles), default=0), n_atoms, bound)
    if not enumerate_types:
        return rep
    try:
        lu = atom_universe(preds, a.beta, 0, max_atoms)
        rep.local_types = len(satisfiable_types(a.domain, lu, max_types))
        u = atom_universe(preds, a.beta, a.degree, max_atoms)
        types = satisfiable_types(a.domain, u, max_types)
    except BudgetExceeded:
        return rep
    rep.sat_types = len(types)
    rep.bta_states = len(bta_state_space(a, types))
    if len(a.bundles) * len(types) <= max_work:
        rep.bta_transitions = count_bta_transitions(a, types)
    return rep


def bta_state_space(a: Tgca, types):
    return [(q, k) for q in a.locations for k in range(len(types))]


def count_bta_transitions(a: Tgca, types) -> int:
    by_cur = {}
    for tau in types:
        key = current_key(tau)
        by_cur[key] = by_cur.get(key, 0) + 1
    total = 0
    for b in a.resolved_bundles():
        for tau in types:
            if not entails(tau, b.guard):
                continue
            n = 1
            for i in range(a.degree):
                n *= len(b.options[i]) * by_cur.get(child_key(tau, i), 0)
            total += n
    return total


# -- text format -----------------------------------------------------------------


def _symbols(form, what):
    out = []
    for x in form[1:]:
        if not isinstance(x, Sym):
            fail(x, f"{what} must be symbols")
        out.append(str(x))
    return out


def _int_field(form):
    if len(form) != 2 or not isinstance(form[1], Sym) or not form[1].isdigit():
        fail(form, f"({form[0]} N) expects one natural number")
    return int(form[1])


def parse_tgca(text: str, domain=None) -> Tgca:
    forms = read_all(text)
    if len(forms) != 1 or not isinstance(forms[0], SList) or not forms[0] or forms[0][0] not in ("tgca", "bta"):
        fail(forms[0] if forms else Sym(""), "expected a single (tgca ...) form")
    top = forms[0]
    fields = {}
    trans = []
    for f in top[1:]:
        if not isinstance(f, SList) or not f or not isinstance(f[0], Sym):
            fail(f, "expected a (key ...) field")
        key = str(f[0])
        if key == "trans":
            trans.append(f)
        elif key in fields:
            fail(f, f"duplicate field {key}")
        else:
            fields[key] = f
    for req in ("degree", "locations", "initial", "alphabet"):
        if req not in fields:
            fail(top, f"missing field ({req} ...)")
    if domain is None:
        dom_name = _symbols(fields["domain"], "domain")[0] if "domain" in fields else "eq"
        domain = get_domain(dom_name)
    degree = _int_field(fields["degree"])
    beta = _int_field(fields["beta"]) if "beta" in fields else 0
    locations = _symbols(fields["locations"], "locations")
    alphabet = _symbols(fields["alphabet"], "letters")
    initial = _symbols(fields["initial"], "initial locations")
    accepting = _symbols(fields["accepting"], "accepting locations") if "accepting" in fields else list(locations)
    offset = _int_field(fields["parent-offset"]) if "parent-offset" in fields else None
    bundles = []
    for f in trans:
        if len(f) < 4:
            fail(f, "(trans SOURCE LETTER GUARD TARGET...) is too short")
        src, letter, guard = f[1], f[2], C.parse_constraint(f[3])
        opts = []
        for t in f[4:]:
            if isinstance(t, SList):
                if not t or t[0] != "any":
                    fail(t, "a target set is written (any q ...)")
                opts.append(tuple(_symbols(t, "targets")))
            else:
                opts.append((str(t),))
        bundles.append(Bundle(str(src), str(letter), guard, tuple(opts)))
    return Tgca(tuple(locations), tuple(alphabet), degree, beta, frozenset(initial), frozenset(accepting),
                tuple(bundles), domain, offset)


def format_tgca(a: Tgca) -> str:
    nm = a.name
    lines = [
        "(tgca",
        f"  (domain {a.domain.id})",
        f"  (degree {a.degree})",
        f"  (beta {a.beta})",
    ]
    if a.parent_offset is not None:
        lines.append(f"  (parent-offset {a.parent_offset})")
    lidx = a.location_index()
    order = lambda qs: sorted(qs, key=lidx.__getitem__)
    lines.append(f"  (alphabet {' '.join(a.alphabet)})")
    lines.append(f"  (locations {' '.join(nm(q) for q in a.locations)})")
    lines.append(f"  (initial {' '.join(nm(q) for q in order(a.initial))})")
    lines.append(f"  (accepting {' '.join(nm(q) for q in order(a.accepting))})")
    for b in a.bundles:
        targets = []
        for o in b.options:
            targets.append(nm(o[0]) if len(o) == 1 else f"(any {' '.join(nm(q) for q in o)})")
        lines.append(f"  (trans {nm(b.source)} {b.letter} {C.to_sexpr(b.guard)} {' '.join(targets)})")
    lines.append(")")
    return "\n".join(lines)


def path_name(path):
    return ".".join(map(str, path)) if path else "e"


def format_witness(a: Tgca, tree: DataTreePrefix, run: RunPrefix | None = None) -> str:
    fmt = a.domain.format_value
    lines = []
    for p in tree_paths(tree.degree, tree.depth):
        letter, vals = tree.nodes[p]
        lines.append(f"node {path_name(p)} letter={letter} values={','.join(fmt(v) for v in vals)}")
    if run is not None:
        for p in tree_paths(tree.degree, tree.depth - 1) if tree.depth else []:
            t = run.runs[p]
            lines.append(f"run {path_name(p)} source={a.name(t.source)} targets={','.join(a.name(q) for q in t.targets)}")
    return "\n".join(lines)
