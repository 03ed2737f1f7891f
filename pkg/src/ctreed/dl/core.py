"""ALCO(D) consistency by compilation into a tree global constraint automaton.

Pipeline: :func:`normalize`, :func:`derive_params`, concept types,
:func:`compile_automaton`, then :func:`check_consistency`, which loops over
the partitions of the individual names and tests nonemptiness of the
automaton of each quotient.

Register layout (1-based): ``x_j = j`` holds feature ``f_j`` of the current
element for ``j <= alpha``; ``x_{a_l, j} = alpha*(l+1) + j`` holds ``f_j`` of
individual ``a_l``.

Locations are tuples: :data:`ROOT`, :data:`BOX` and
``("c", g, T, sl, act)`` where ``g`` is the global abstraction (a tuple of
``(type, act)`` per individual), ``T`` a concept type as a bit mask over the
closure, ``sl`` a sorted tuple of ``(role name, individual index)`` links and
``act`` a feature bit mask (bit ``j-1`` for ``f_j``).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product

from .. import constraints as Cn
from ..domains import get_domain
from ..errors import (BudgetExceeded, NominalsNotSupported, ResourceExceeded, UnknownFeature, UnknownIndividual,
                      UnsupportedConstruct)
from ..tgca import DEFAULT_TRANSITION_CAP, Bundle, Tgca, concretize_witness, nonemptiness
from ..symtypes import DEFAULT_ATOM_CAP, DEFAULT_TYPE_BUDGET
from . import syntax as S

ROOT = ("root",)
BOX = ("box",)
LETTER = "a"
DEFAULT_PARTITION_CAP = 6
FRESH_INDIVIDUAL = "_a0"


# -- normalization -----------------------------------------------------------


def _and(a, b):
    if isinstance(a, S.Bot) or isinstance(b, S.Bot):
        return S.BOT
    if isinstance(a, S.Top):
        return b
    if isinstance(b, S.Top):
        return a
    return S.And(a, b)


def _or(a, b):
    if isinstance(a, S.Top) or isinstance(b, S.Top):
        return S.TOP
    if isinstance(a, S.Bot):
        return b
    if isinstance(b, S.Bot):
        return a
    return S.Or(a, b)


def nnf(c, negated=False):
    """Negation normal form; ``negated`` asks for the form of the complement."""
    if isinstance(c, S.Not):
        return nnf(c.arg, not negated)
    if isinstance(c, S.Top):
        return S.BOT if negated else S.TOP
    if isinstance(c, S.Bot):
        return S.TOP if negated else S.BOT
    if isinstance(c, S.Name):
        return S.NegName(c.name) if negated else c
    if isinstance(c, S.NegName):
        return S.Name(c.name) if negated else c
    if isinstance(c, S.Nominal):
        return S.NegNominal(c.ind) if negated else c
    if isinstance(c, S.NegNominal):
        return S.Nominal(c.ind) if negated else c
    if isinstance(c, S.And):
        l, r = nnf(c.left, negated), nnf(c.right, negated)
        return _or(l, r) if negated else _and(l, r)
    if isinstance(c, S.Or):
        l, r = nnf(c.left, negated), nnf(c.right, negated)
        return _and(l, r) if negated else _or(l, r)
    if isinstance(c, S.Exists):
        arg = nnf(c.arg, negated)
        return S.Forall(c.role, arg) if negated else S.Exists(c.role, arg)
    if isinstance(c, S.Forall):
        arg = nnf(c.arg, negated)
        return S.Exists(c.role, arg) if negated else S.Forall(c.role, arg)
    if isinstance(c, S.CdExists):
        if negated:
            return S.CdForall(c.bindings, Cn.negate_nnf(c.theta))
        return S.CdExists(c.bindings, Cn.nnf(c.theta))
    if isinstance(c, S.CdForall):
        if negated:
            return S.CdExists(c.bindings, Cn.negate_nnf(c.theta))
        return S.CdForall(c.bindings, Cn.nnf(c.theta))
    raise TypeError(f"not a concept: {c!r}")


def normalize(o: S.Ontology) -> S.Ontology:
    """NNF everywhere, every GCI as top below a concept, and at least one individual."""
    tbox = []
    for lhs, rhs in o.tbox:
        if isinstance(lhs, S.Top):
            c = nnf(rhs)
        else:
            c = _or(nnf(lhs, True), nnf(rhs))
        if not isinstance(c, S.Top) and (S.TOP, c) not in tbox:
            tbox.append((S.TOP, c))
    abox = []
    for x in o.abox:
        if isinstance(x, S.ConceptAssertion):
            x = S.ConceptAssertion(x.ind, nnf(x.concept))
        elif isinstance(x, S.ConstraintAssertion):
            x = S.ConstraintAssertion(Cn.nnf(x.theta), x.bindings)
        if x not in abox:
            abox.append(x)
    out = S.Ontology(tbox, abox, o.functional, o.domain, True)
    if not out.individuals():
        name = FRESH_INDIVIDUAL
        while name in {f for f in out.features()} or name in out.role_names():
            name = "_" + name
        out.abox.append(S.ConceptAssertion(name, S.TOP))
    return out


# -- closure and parameters ----------------------------------------------------


def _depth(c):
    ks = S.children(c)
    return 1 + max((_depth(k) for k in ks), default=0)


def subconcepts(o: S.Ontology, with_nominals=True) -> list:
    """Subconcepts of the normalized ontology, plus both polarities of every individual's nominal."""
    seen = set()
    stack = [rhs for _, rhs in o.tbox] + [x.concept for x in o.concept_assertions()]
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        stack.extend(S.children(c))
    if with_nominals:
        for a in o.individuals():
            seen.add(S.Nominal(a))
            seen.add(S.NegNominal(a))
    return sorted(seen, key=lambda c: (_depth(c), S.show(c)))


@dataclass
class DlParams:
    individuals: tuple
    features: tuple
    roles: tuple
    existentials: tuple
    cd_existentials: tuple
    n_ex: int
    n_cd: int
    n_var: int
    eta: int
    alpha: int
    kappa: int
    d: int
    beta: int
    lam: dict  # entry -> direction; entries are ("ex", C) and ("cd", C, j)
    dirs: dict  # Role -> frozenset of directions
    functional: frozenset = frozenset()

    def entries_at(self, i):
        return [e for e, k in self.lam.items() if k == i]

    def feature_index(self, f):
        try:
            return self.features.index(f) + 1
        except ValueError:
            raise UnknownFeature(f"feature {f} does not occur in the ontology") from None

    def individual_index(self, a):
        try:
            return self.individuals.index(a)
        except ValueError:
            raise UnknownIndividual(f"individual {a} does not occur in the ontology") from None

    def roles_at(self, i):
        return sorted(r for r, ds in self.dirs.items() if i in ds)

    def items(self):
        return [("eta", self.eta), ("alpha", self.alpha), ("kappa", self.kappa), ("n_ex", self.n_ex),
                ("n_cd", self.n_cd), ("n_var", self.n_var), ("d", self.d), ("beta", self.beta)]

    def lambda_table(self):
        rows = []
        for e, i in sorted(self.lam.items(), key=lambda kv: (kv[1], _entry_key(kv[0]))):
            if e[0] == "ex":
                rows.append(f"lambda {S.show(e[1])} -> {i}")
            else:
                rows.append(f"lambda ({S.show(e[1])}, {e[2]}) -> {i}")
        for r in sorted(self.dirs):
            rows.append(f"dir {r} = {{{','.join(map(str, sorted(self.dirs[r])))}}}")
        return rows


def _entry_key(e):
    return (e[0], S.show(e[1])) + tuple(e[2:])


def _entry_role(e):
    """Role an entry of the labeling domain talks about, or None."""
    if e[0] == "ex":
        return e[1].role
    c, j = e[1], e[2]
    if j <= len(c.bindings):
        return c.bindings[j - 1][1].role
    return None


def derive_params(o: S.Ontology, logic="alco", closure=None) -> DlParams:
    if closure is None:
        closure = subconcepts(o, logic != "alci")
    inds = tuple(o.individuals())
    feats = tuple(o.features())
    roles = {S.Role(x.role) for x in o.role_assertions()}
    for c in closure:
        roles |= S.concept_roles(c)
    roles = tuple(sorted(roles))
    exs = tuple(c for c in closure if isinstance(c, S.Exists))
    cds = tuple(c for c in closure if isinstance(c, S.CdExists))
    n_ex, n_cd = len(exs), len(cds)
    n_var = max([0] + [len(c.bindings) for c in cds])
    eta, alpha = len(inds), len(feats)
    d = max(n_ex + n_cd * n_var, eta)
    beta = alpha * (eta + 2) if logic == "alci" else (eta + 1) * alpha
    entries = [("ex", c) for c in exs] + [("cd", c, j) for c in cds for j in range(1, n_var + 1)]
    functional = frozenset(o.functional) if logic == "alcof" else frozenset()
    lam = {}
    if functional:
        keys = {}
        for e in entries:
            r = _entry_role(e)
            key = ("fun", r.name) if r is not None and r.name in functional else ("own", e)
            if key not in keys:
                keys[key] = len(keys)
            lam[e] = keys[key]
    else:
        for k, e in enumerate(entries):
            lam[e] = k
    dirs = {}
    for e, i in lam.items():
        r = _entry_role(e)
        if r is not None:
            dirs.setdefault(r, set()).add(i)
    dirs = {r: frozenset(v) for r, v in dirs.items()}
    kappa = len({r.name for r in roles})
    return DlParams(inds, feats, roles, exs, cds, n_ex, n_cd, n_var, eta, alpha, kappa, d, beta, lam, dirs,
                    functional)


# -- concept types -------------------------------------------------------------


class Closure:
    """The closure as an indexed list; concept types are int masks over it."""

    def __init__(self, o: S.Ontology, with_nominals=True):
        self.concepts = subconcepts(o, with_nominals)
        self.index = {c: k for k, c in enumerate(self.concepts)}
        self.individuals = o.individuals()
        self.gci = 0
        for _, rhs in o.tbox:
            self.gci |= 1 << self.index[rhs]

    def bit(self, c):
        return 1 << self.index[c]

    def mask(self, cs):
        m = 0
        for c in cs:
            m |= self.bit(c)
        return m

    def members(self, t):
        return [c for k, c in enumerate(self.concepts) if (t >> k) & 1]

    def show_type(self, t):
        return "{" + ", ".join(S.show(c) for c in self.members(t)) + "}"


def is_concept_type(cl: Closure, t: int) -> bool:
    """Clash freedom, nominal dichotomy, Boolean closure and the GCIs."""
    idx = cl.index
    has = lambda c: c in idx and bool((t >> idx[c]) & 1)
    if t & cl.gci != cl.gci:
        return False
    for c in cl.members(t):
        if isinstance(c, S.Bot):
            return False
        if isinstance(c, S.Name) and has(S.NegName(c.name)):
            return False
        if isinstance(c, S.And) and not (has(c.left) and has(c.right)):
            return False
        if isinstance(c, S.Or) and not (has(c.left) or has(c.right)):
            return False
    for a in cl.individuals:
        if S.Nominal(a) in idx and has(S.Nominal(a)) == has(S.NegNominal(a)):
            return False
    return True


def type_kind(cl: Closure, t: int):
    """``"anonymous"``, the individual an a-type names, or None."""
    pos = [a for a in cl.individuals if S.Nominal(a) in cl.index and (t >> cl.index[S.Nominal(a)]) & 1]
    if not pos:
        return "anonymous"
    if len(pos) == 1:
        return pos[0]
    return None


def concept_types(cl: Closure, budget=DEFAULT_TYPE_BUDGET, usable_only=True) -> list:
    """All concept types in a fixed order, containing top when it occurs.

    Backtracks over the closure with subconcepts decided first, so every
    condition can be checked as soon as its concept is decided. With
    ``usable_only`` the types naming two individuals are skipped.
    """
    cs = cl.concepts
    idx = cl.index
    n = len(cs)
    out = []
    partner = {}
    for c in cs:
        if isinstance(c, S.Name) and S.NegName(c.name) in idx:
            partner[idx[c]] = idx[S.NegName(c.name)]
            partner[idx[S.NegName(c.name)]] = idx[c]
    nominal_pair = {}
    for a in cl.individuals:
        if S.Nominal(a) in idx and S.NegNominal(a) in idx:
            nominal_pair[idx[S.Nominal(a)]] = idx[S.NegNominal(a)]
            nominal_pair[idx[S.NegNominal(a)]] = idx[S.Nominal(a)]
    nominal_pos = {idx[S.Nominal(a)] for a in cl.individuals if S.Nominal(a) in idx}

    def allowed(k, t, inside):
        c = cs[k]
        if (cl.gci >> k) & 1 and not inside:
            return False
        if isinstance(c, S.Top):
            return inside
        if not inside:
            if k in nominal_pair and nominal_pair[k] < k:
                return bool((t >> nominal_pair[k]) & 1)
            return True
        if isinstance(c, S.Bot):
            return False
        if k in partner and partner[k] < k and (t >> partner[k]) & 1:
            return False
        if k in nominal_pair and nominal_pair[k] < k and (t >> nominal_pair[k]) & 1:
            return False
        if isinstance(c, S.And):
            return bool((t >> idx[c.left]) & 1) and bool((t >> idx[c.right]) & 1)
        if isinstance(c, S.Or):
            return bool((t >> idx[c.left]) & 1) or bool((t >> idx[c.right]) & 1)
        if usable_only and k in nominal_pos:
            return not any((t >> p) & 1 for p in nominal_pos if p < k)
        return True

    def go(k, t):
        if k == n:
            out.append(t)
            if len(out) > budget:
                raise BudgetExceeded(f"more than {budget} concept types")
            return
        for inside in (False, True):
            if allowed(k, t, inside):
                go(k + 1, t | (1 << k) if inside else t)

    go(0, 0)
    return out


# -- quotient and partitions --------------------------------------------------


def _rename_concept(c, m):
    if isinstance(c, S.Nominal):
        return S.Nominal(m.get(c.ind, c.ind))
    if isinstance(c, S.NegNominal):
        return S.NegNominal(m.get(c.ind, c.ind))
    if isinstance(c, S.Not):
        return S.Not(_rename_concept(c.arg, m))
    if isinstance(c, S.And):
        return S.And(_rename_concept(c.left, m), _rename_concept(c.right, m))
    if isinstance(c, S.Or):
        return S.Or(_rename_concept(c.left, m), _rename_concept(c.right, m))
    if isinstance(c, S.Exists):
        return S.Exists(c.role, _rename_concept(c.arg, m))
    if isinstance(c, S.Forall):
        return S.Forall(c.role, _rename_concept(c.arg, m))
    return c


def quotient(o: S.Ontology, part) -> S.Ontology:
    """Rename every individual to the least member, in input order, of its block."""
    order = {a: k for k, a in enumerate(o.individuals())}
    m = {}
    for block in part:
        rep = min(block, key=lambda a: order.get(a, len(order)))
        for a in block:
            m[a] = rep
    tbox = [(_rename_concept(l, m), _rename_concept(r, m)) for l, r in o.tbox]
    abox = []
    for x in o.abox:
        if isinstance(x, S.ConceptAssertion):
            y = S.ConceptAssertion(m.get(x.ind, x.ind), _rename_concept(x.concept, m))
        elif isinstance(x, S.RoleAssertion):
            y = S.RoleAssertion(m.get(x.source, x.source), m.get(x.target, x.target), x.role)
        else:
            vm, binds = {}, []
            for v, f, a in x.bindings:
                b = m.get(a, a)
                nv = f"{f}({b})"
                vm[Cn.Var(v)] = Cn.Var(nv)
                if (nv, f, b) not in binds:
                    binds.append((nv, f, b))
            y = S.ConstraintAssertion(Cn.substitute(x.theta, vm), tuple(binds))
        if y not in abox:
            abox.append(y)
    return S.Ontology(tbox, abox, o.functional, o.domain, o.normalized)


def partitions(items: list) -> list:
    """All set partitions, most blocks first; the identity partition comes first."""
    items = list(items)
    out = []

    def go(k, blocks):
        if k == len(items):
            out.append([list(b) for b in blocks])
            return
        for b in blocks:
            b.append(items[k])
            go(k + 1, blocks)
            b.pop()
        blocks.append([items[k]])
        go(k + 1, blocks)
        blocks.pop()

    go(0, [])
    pos = {a: k for k, a in enumerate(items)}
    rgs = lambda p: tuple(next(i for i, b in enumerate(p) if a in b) for a in items)
    out.sort(key=lambda p: (-len(p), rgs(p)))
    for p in out:
        p.sort(key=lambda b: pos[b[0]])
    return out


def format_partition(part) -> str:
    return ";".join("{" + ",".join(b) + "}" for b in part)


# -- compilation ---------------------------------------------------------------


def _bits(mask):
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return out


def _subsets(items):
    items = list(items)
    for n in range(1 << len(items)):
        yield tuple(items[k] for k in range(len(items)) if (n >> k) & 1)


class CompilerBase:
    """Shared machinery: closure, parameters, concept types and per-type indexes."""

    logic = "alco"

    def __init__(self, o: S.Ontology, domain, max_transitions=DEFAULT_TRANSITION_CAP,
                 max_types=DEFAULT_TYPE_BUDGET):
        if not o.normalized:
            o = normalize(o)
        self.o = o
        self.domain = domain
        self.cap = max_transitions
        self.cl = Closure(o, self.logic != "alci")
        self.P = derive_params(o, self.logic, self.cl.concepts)
        self.types = concept_types(self.cl, max_types)
        self._info = {}
        self._moves = {}
        self.locations = []
        self.bundles = []
        self._seen = {}
        self._check_assertions()

    def _check_assertions(self):
        P = self.P
        self.assert_act = [0] * P.eta
        self.assert_theta = []
        for x in self.o.constraint_assertions():
            for v, f, a in x.bindings:
                l = P.feature_index(f)
                i = P.individual_index(a)
                self.assert_act[i] |= 1 << (l - 1)

    def info(self, t):
        """(foralls, exists, cds) of type ``t``: [(Role, concept)], [(Role, concept)], [concept]."""
        got = self._info.get(t)
        if got is None:
            fa, ex, cd = [], [], []
            for c in self.cl.members(t):
                if isinstance(c, S.Forall):
                    fa.append((c.role, c.arg))
                elif isinstance(c, S.Exists):
                    ex.append((c.role, c.arg))
                elif isinstance(c, S.CD_KINDS):
                    cd.append(c)
            got = self._info[t] = (fa, ex, cd)
        return got

    def has(self, t, c):
        k = self.cl.index.get(c)
        return k is not None and bool((t >> k) & 1)

    def active_entries(self, t, i):
        out = []
        for e in self.P.entries_at(i):
            if e[0] == "ex" and self.has(t, e[1]):
                out.append(e)
            elif e[0] == "cd" and e[2] <= len(e[1].bindings) and self.has(t, e[1]):
                out.append(e)
        return out

    def relevant_features(self, t, role_of):
        """Feature mask read through role ``role_of`` by the CD-restrictions of ``t``."""
        m = 0
        for c in self.info(t)[2]:
            for _, p in c.bindings:
                if p.role is not None and p.role == role_of:
                    m |= 1 << (self.P.feature_index(p.feature) - 1)
        return m

    def own_features(self, t):
        m = 0
        for c in self.info(t)[2]:
            for _, p in c.bindings:
                if p.role is None:
                    m |= 1 << (self.P.feature_index(p.feature) - 1)
        return m

    def add_location(self, q):
        k = self._seen.get(q)
        if k is None:
            k = self._seen[q] = len(self.locations)
            self.locations.append(q)
            if len(self.locations) > self.cap:
                raise BudgetExceeded(f"more than {self.cap} automaton locations")
            self._todo.append(q)
        return k

    def add_bundle(self, src, guard, options):
        self.bundles.append(Bundle(src, LETTER, guard, tuple(self._frozen(o) for o in options)))
        if len(self.bundles) > self.cap:
            raise BudgetExceeded(f"more than {self.cap} automaton transitions")

    def _frozen(self, o):
        got = self._tuples.get(id(o))
        if got is None or got[0] is not o:
            got = self._tuples[id(o)] = (o, tuple(o))
        return got[1]

    def cd_guard(self, t, z_sets):
        """Conjunction of the Theta_C of every CD-restriction in ``t``; ``z_sets(c)`` gives its Z_j."""
        parts = []
        for c in self.info(t)[2]:
            zs = z_sets(c)
            insts = []
            for combo in product(*zs):
                m = {Cn.Var(v): y for (v, _), y in zip(c.bindings, combo)}
                insts.append(Cn.substitute(c.theta, m))
            parts.append(Cn.disj(insts) if isinstance(c, S.CdExists) else Cn.conj(insts))
        return parts

    def assertion_guard(self, child_of):
        """Constraint assertions over the registers of the individuals' nodes."""
        P = self.P
        parts = []
        for x in self.o.constraint_assertions():
            m = {}
            for v, f, a in x.bindings:
                m[Cn.Var(v)] = Cn.child(child_of(P.individual_index(a)), P.feature_index(f))
            parts.append(Cn.substitute(x.theta, m))
        return parts

    def root_bundles(self):
        for guard, opts in self.root_choices():
            self.add_root(guard, opts)

    def add_root(self, guard, opts):
        for o in opts:
            for q in o:
                self.add_location(q)
        self.add_bundle(ROOT, guard, opts)

    def build(self, roots=None):
        """The automaton; ``roots`` restricts it to some of the :meth:`root_choices`."""
        self.locations, self.bundles, self._seen = [], [], {}
        self._registered = {}
        self._tuples = {}
        self._todo = deque()
        self.add_location(ROOT)
        self.add_location(BOX)
        self.add_bundle(BOX, Cn.TRUE, [(BOX,)] * self.P.d)
        if roots is None:
            self.root_bundles()
        else:
            for guard, opts in roots:
                self.add_root(guard, opts)
        while self._todo:
            q = self._todo.popleft()
            if q not in (ROOT, BOX):
                self.general_bundles(q)
        names = {q: self.location_name(k, q) for k, q in enumerate(self.locations)}
        return Tgca(tuple(self.locations), (LETTER,), self.P.d, self.P.beta, frozenset([ROOT]),
                    frozenset(self.locations), tuple(self.bundles), self.domain, self.parent_offset(), names)

    def general_bundles(self, q):
        moves = self._moves.get(q)
        if moves is None:
            moves = self._moves[q] = list(self.general_moves(q))
        for guard, opts in moves:
            for o in opts:
                # Option lists are shared between moves; holding them keeps their ids unique.
                if id(o) not in self._registered:
                    self._registered[id(o)] = o
                    for q2 in o:
                        self.add_location(q2)
            self.add_bundle(q, guard, opts)

    def parent_offset(self):
        return None

    def location_name(self, k, q):
        if q == ROOT:
            return "root"
        if q == BOX:
            return "box"
        return f"c{k}"


class AlcoCompiler(CompilerBase):
    """Locations (g, T, sl, act); with ``functional`` roles it implements the ALCOF variant."""

    logic = "alco"

    def __init__(self, o, domain, max_transitions=DEFAULT_TRANSITION_CAP, max_types=DEFAULT_TYPE_BUDGET):
        super().__init__(o, domain, max_transitions, max_types)
        P = self.P
        self.ind_reg = lambda l, j: P.alpha * (l + 1) + j
        self.anon = [t for t in self.types if type_kind(self.cl, t) == "anonymous"]
        self.a_types = [[t for t in self.types if type_kind(self.cl, t) == a] for a in P.individuals]
        self._anon_cache = {}
        self._valid_cache = {}
        self._links_cache = {}
        self._groups_cache = {}

    # Locations ------------------------------------------------------------

    def mentioned_roles(self, t):
        fa, ex, cd = self.info(t)
        roles = {r.name for r, _ in fa} | {r.name for r, _ in ex}
        for c in cd:
            roles.update(p.role.name for _, p in c.bindings if p.role is not None)
        return roles

    def valid(self, g, t, sl):
        """Value restrictions over the links, and at most one link per functional role."""
        key = (g, t, sl)
        got = self._valid_cache.get(key)
        if got is None:
            got = True
            for r, c in self.info(t)[0]:
                for rn, l in sl:
                    if rn == r.name and not self.has(g[l][0], c):
                        got = False
            for rn in self.P.functional:
                if sum(1 for x, _ in sl if x == rn) > 1:
                    got = False
            self._valid_cache[key] = got
        return got

    def link_sets(self, g, t, forced=()):
        """Link sets containing ``forced``, free over the roles ``t`` mentions."""
        key = (g, t, forced)
        got = self._links_cache.get(key)
        if got is None:
            got = self._links_cache[key] = self._link_sets(g, t, forced)
        return got

    def _link_sets(self, g, t, forced):
        roles = self.mentioned_roles(t)
        free = [(r, l) for r in sorted(roles) for l in range(self.P.eta) if (r, l) not in forced]
        out = []
        for extra in _subsets(free):
            sl = tuple(sorted(set(forced) | set(extra)))
            if self.valid(g, t, sl):
                out.append(sl)
        return out

    def anon_with(self, req):
        got = self._anon_cache.get(req)
        if got is None:
            got = self._anon_cache[req] = [t for t in self.anon if t & req == req]
        return got

    # Root -------------------------------------------------------------------

    def root_guard(self, g):
        P = self.P
        parts = []
        for i in range(P.eta):
            for j in range(1, P.alpha + 1):
                if (g[i][1] >> (j - 1)) & 1:
                    for i2 in range(P.eta):
                        parts.append(Cn.eq(Cn.child(i, j), Cn.child(i2, self.ind_reg(i, j))))
        parts.extend(self.assertion_guard(lambda i: i))
        return Cn.conj(parts)

    def asserted(self):
        P = self.P
        concepts = [0] * P.eta
        links = [set() for _ in range(P.eta)]
        for x in self.o.concept_assertions():
            concepts[P.individual_index(x.ind)] |= self.cl.bit(x.concept)
        for x in self.o.role_assertions():
            links[P.individual_index(x.source)].add((x.role, P.individual_index(x.target)))
        return concepts, [tuple(sorted(s)) for s in links]

    def root_choices(self):
        """(guard, options) of every root transition, one per global abstraction."""
        P = self.P
        concepts, links = self.asserted()
        cands = []
        for i in range(P.eta):
            ts = [t for t in self.a_types[i] if t & concepts[i] == concepts[i]]
            acts = [m for m in range(1 << P.alpha) if m & self.assert_act[i] == self.assert_act[i]]
            cands.append([(t, m) for t in ts for m in acts])
        for g in product(*cands):
            opts = []
            for i in range(P.eta):
                t, m = g[i]
                opts.append([("c", g, t, sl, m) for sl in self.link_sets(g, t, links[i])])
            if all(opts):
                yield self.root_guard(g), opts + [(BOX,)] * (P.d - P.eta)

    # General ----------------------------------------------------------------

    def child_plan(self, q, i):
        """None if the location cannot move, else (must_be_active, required mask, roles, feature mask)."""
        _, g, t, sl, act = q
        P = self.P
        entries = self.active_entries(t, i)
        roles = P.roles_at(i)
        if not entries or not roles:
            return False, 0, (), 0
        req = 0
        must = False
        fa, ex, cd = self.info(t)
        for r, c in fa:
            if r in roles:
                req |= self.cl.bit(c)
        for e in entries:
            if e[0] != "ex":
                continue
            r, c = e[1].role, e[1].arg
            if not any(rn == r.name and self.has(g[l][0], c) for rn, l in sl):
                req |= self.cl.bit(c)
                must = True
        blocked = any(r.name in P.functional and any(rn == r.name for rn, _ in sl) for r in roles)
        if blocked:
            if must:
                return None
            return False, 0, (), 0
        fmask = 0
        for r in roles:
            fmask |= self.relevant_features(t, r)
        return must, req, tuple(roles), fmask

    def child_choices(self, q, i):
        """[(pattern, locations)]: pattern None is the sink, else the child's act on the relevant features."""
        plan = self.child_plan(q, i)
        if plan is None:
            return []
        must, req, roles, fmask = plan
        if not roles:
            return [(None, [BOX])]
        out = [] if must else [(None, [BOX])]
        out.extend(self.child_groups(q[1], req, fmask))
        return out

    def child_groups(self, g, req, fmask):
        key = (g, req, fmask)
        got = self._groups_cache.get(key)
        if got is not None:
            return got
        groups = {}
        for t2 in self.anon_with(req):
            # Features nobody reads are left undefined.
            free = fmask | self.own_features(t2)
            acts = [m for m in range(1 << self.P.alpha) if m & ~free == 0]
            for sl2 in self.link_sets(g, t2):
                for m in acts:
                    groups.setdefault(m & fmask, []).append(("c", g, t2, sl2, m))
        got = self._groups_cache[key] = [(k, groups[k]) for k in sorted(groups)]
        return got

    def z_sets(self, q, pattern):
        _, g, t, sl, act = q
        P = self.P

        def zs(c):
            out = []
            for _, p in c.bindings:
                l = P.feature_index(p.feature)
                bit = 1 << (l - 1)
                if p.role is None:
                    out.append([Cn.current(l)] if act & bit else [])
                    continue
                z = [Cn.child(i, l) for i in sorted(P.dirs.get(p.role, ()))
                     if pattern[i] is not None and pattern[i] & bit]
                z += [Cn.current(self.ind_reg(a, l)) for rn, a in sl if rn == p.role.name and g[a][1] & bit]
                out.append(z)
            return out

        return zs

    def general_guard(self, q, pattern):
        """Theta_t from the source location and the per-child patterns."""
        _, g, t, sl, act = q
        P = self.P
        parts = self.cd_guard(t, self.z_sets(q, pattern))
        for i in range(P.d):
            if pattern[i] is None:
                continue
            for j in range(1, P.alpha + 1):
                for a in range(P.eta):
                    if (g[a][1] >> (j - 1)) & 1:
                        reg = self.ind_reg(a, j)
                        parts.append(Cn.eq(Cn.current(reg), Cn.child(i, reg)))
        return Cn.conj(parts)

    def pattern_of(self, q, targets):
        """Recover the per-child patterns of a transition from its targets."""
        out = []
        for i, q2 in enumerate(targets):
            if q2 == BOX:
                out.append(None)
                continue
            plan = self.child_plan(q, i)
            fmask = plan[3] if plan else 0
            out.append(q2[4] & fmask)
        return out

    def general_moves(self, q):
        choices = [self.child_choices(q, i) for i in range(self.P.d)]
        if not all(choices):
            return
        for combo in product(*choices):
            pattern = [p for p, _ in combo]
            yield self.general_guard(q, pattern), [locs for _, locs in combo]

    # Decoding ---------------------------------------------------------------

    def describe(self, q):
        if q in (ROOT, BOX):
            return q[0]
        _, g, t, sl, act = q
        P = self.P
        links = ",".join(f"({r} {P.individuals[l]})" for r, l in sl)
        return f"T={self.cl.show_type(t)} sl={{{links}}} act={_act_str(act, P.alpha)}"

    def local(self, q):
        """(concept set, links as (role, individual), defined features) of a location."""
        _, g, t, sl, act = q
        P = self.P
        return (set(self.cl.members(t)), {(r, P.individuals[l]) for r, l in sl},
                {P.features[k] for k in _bits(act)})


def _act_str(act, alpha):
    return "".join("1" if (act >> k) & 1 else "0" for k in range(alpha)) or "-"


def _check_logic(o: S.Ontology, logic):
    if logic not in ("alco", "alci", "alcof"):
        raise UnsupportedConstruct(f"unknown logic {logic!r}")
    if logic != "alci" and o.uses_inverse():
        raise UnsupportedConstruct("inverse roles need --logic alci")
    if logic == "alci" and o.uses_nominals():
        raise NominalsNotSupported("nominals cannot be combined with inverse roles")
    if logic != "alcof" and o.functional:
        raise UnsupportedConstruct("functional roles need --logic alcof")


def make_compiler(o: S.Ontology, domain, logic="alco", max_transitions=DEFAULT_TRANSITION_CAP,
                  max_types=DEFAULT_TYPE_BUDGET):
    _check_logic(o, logic)
    if logic == "alci":
        from .ext import AlciCompiler

        return AlciCompiler(o, domain, max_transitions, max_types)
    if logic == "alcof":
        from .ext import AlcofCompiler

        return AlcofCompiler(o, domain, max_transitions, max_types)
    return AlcoCompiler(o, domain, max_transitions, max_types)


def compile_automaton(o: S.Ontology, domain, max_transitions=DEFAULT_TRANSITION_CAP,
                      max_types=DEFAULT_TYPE_BUDGET) -> Tgca:
    """The ALCO automaton of ``o`` under the unique name assumption."""
    return make_compiler(o, domain, "alco", max_transitions, max_types).build()


# -- consistency -----------------------------------------------------------------


@dataclass
class Verdict:
    consistent: bool
    partition: list | None = None
    ontology: S.Ontology | None = None
    compiler: object = None
    automaton: Tgca | None = None
    result: object = None
    witness: tuple | None = None
    tried: int = 0
    last: dict = field(default_factory=dict)


def _respects_functional(o: S.Ontology, part) -> bool:
    """Partitions must merge any two targets of the same functional role from one source."""
    if not o.functional:
        return True
    block = {a: k for k, b in enumerate(part) for a in b}
    seen = {}
    for x in o.role_assertions():
        if x.role not in o.functional:
            continue
        key = (block[x.source], x.role)
        if key in seen and seen[key] != block[x.target]:
            return False
        seen[key] = block[x.target]
    return True


def check_consistency(o: S.Ontology, domain=None, logic="alco", una=False, witness_depth=None,
                      max_atoms=DEFAULT_ATOM_CAP, max_types=DEFAULT_TYPE_BUDGET,
                      max_transitions=DEFAULT_TRANSITION_CAP, partition_cap=DEFAULT_PARTITION_CAP) -> Verdict:
    """Consistent on the first partition whose quotient automaton is nonempty."""
    if domain is None:
        domain = get_domain(o.domain or "dense")
    _check_logic(o, logic)
    o = normalize(o)
    inds = o.individuals()
    if una:
        parts = [[[a] for a in inds]]
    else:
        if len(inds) > partition_cap:
            raise ResourceExceeded(f"{len(inds)} individuals exceed the partition cap {partition_cap}")
        parts = partitions(inds)
    tried = 0
    last = {}
    for part in parts:
        if logic == "alcof" and not _respects_functional(o, part):
            continue
        tried += 1
        q = quotient(o, part) if any(len(b) > 1 for b in part) else o
        comp = make_compiler(q, domain, logic, max_transitions, max_types)
        # Root transitions never share a location below the root, so each one is decided on its own.
        for choice in comp.root_choices():
            a = comp.build([choice])
            res = nonemptiness(a, "local", max_atoms, max_types, max_transitions)
            last = {"compiler": comp, "automaton": a, "ontology": q}
            if res.nonempty:
                wit = concretize_witness(a, res, witness_depth) if witness_depth is not None else None
                return Verdict(True, part, q, comp, a, res, wit, tried)
        if not last or last["compiler"] is not comp:
            last = {"compiler": comp, "automaton": comp.build([]), "ontology": q}
    return Verdict(False, None, last.get("ontology"), last.get("compiler"), last.get("automaton"), None, None,
                   tried, last)
