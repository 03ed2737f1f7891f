"""Variant compilations: inverse roles, functional roles and constraint assertions.

The inverse-role automaton drops symbolic links and global abstractions.
Its locations are ``("d1", gamma, f, T)`` for the node of individual
``a_gamma`` (``f`` holds every individual's feature mask) and
``("in", R_up, T_up, act_up, T, act)`` for an anonymous node reached from
its parent through ``R_up``. ``T_up`` keeps only the arguments of the
parent's restrictions over the inverse of ``R_up``, the part a child can
read. Registers ``alpha+1 .. 2*alpha`` copy the parent's features and
individual ``a_l`` lives at ``alpha*(l+2) + j``.
"""

from __future__ import annotations

from itertools import product

from .. import constraints as Cn
from ..errors import UnsupportedConstruct
from . import syntax as S
from .core import BOX, ROOT, AlcoCompiler, CompilerBase, _act_str, _bits, _respects_functional

__all__ = ["AlciCompiler", "AlcofCompiler", "compile_automaton_alci", "compile_automaton_alcof",
           "compile_constraint_assertions", "functional_closure_ok"]


class AlcofCompiler(AlcoCompiler):
    """ALCO locations with one shared direction per functional role."""

    logic = "alcof"


class AlciCompiler(CompilerBase):
    logic = "alci"

    def __init__(self, o, domain, max_transitions, max_types):
        super().__init__(o, domain, max_transitions, max_types)
        P = self.P
        self.ind_reg = lambda l, j: P.alpha * (l + 2) + j
        self._anon_cache = {}
        self._groups_cache = {}
        read = 0
        for c in self.cl.concepts:
            if isinstance(c, S.CD_KINDS):
                for _, p in c.bindings:
                    if p.role is not None:
                        read |= 1 << (P.feature_index(p.feature) - 1)
        # Features some node may read from a neighbour.
        self.neighbour_read = read
        # A child reached through r reads its parent's type only through restrictions over r's inverse.
        self._up_mask = {}
        for c in self.cl.concepts:
            if isinstance(c, (S.Exists, S.Forall)):
                r = c.role.inverse
                self._up_mask[r] = self._up_mask.get(r, 0) | self.cl.bit(c.arg)

    def parent_offset(self):
        return self.P.alpha

    def role_at(self, i):
        roles = self.P.roles_at(i)
        return roles[0] if roles else None

    def types_with(self, req):
        got = self._anon_cache.get(req)
        if got is None:
            got = self._anon_cache[req] = [t for t in self.types if t & req == req]
        return got

    # Root -------------------------------------------------------------------

    def asserted_edges(self, gamma):
        """(Role, individual index) pairs: a_gamma reaches that individual through the role."""
        P = self.P
        out = []
        for x in self.o.role_assertions():
            s, t = P.individual_index(x.source), P.individual_index(x.target)
            if s == gamma:
                out.append((S.Role(x.role), t))
            if t == gamma:
                out.append((S.Role(x.role, True), s))
        return sorted(set(out))

    def edges_ok(self, types, i, i2, role):
        """Value restrictions across an asserted edge from ``i`` to ``i2``."""
        for r, c in self.info(types[i])[0]:
            if r == role and not self.has(types[i2], c):
                return False
        for r, c in self.info(types[i2])[0]:
            if r == role.inverse and not self.has(types[i], c):
                return False
        return True

    def root_choices(self):
        """(guard, options) of every root transition: a feature mask per individual and joint types."""
        P = self.P
        concepts = [0] * P.eta
        for x in self.o.concept_assertions():
            concepts[P.individual_index(x.ind)] |= self.cl.bit(x.concept)
        cands = [[t for t in self.types if t & concepts[i] == concepts[i]] for i in range(P.eta)]
        edges = [(P.individual_index(x.source), P.individual_index(x.target), S.Role(x.role))
                 for x in self.o.role_assertions()]
        involved = sorted({e[0] for e in edges} | {e[1] for e in edges})
        joint = []

        def go(k, chosen):
            if k == len(involved):
                joint.append(dict(chosen))
                return
            i = involved[k]
            for t in cands[i]:
                chosen[i] = t
                if all(self.edges_ok(chosen, s, u, r) for s, u, r in edges if s in chosen and u in chosen):
                    go(k + 1, chosen)
                del chosen[i]

        go(0, {})
        acts = [[m for m in range(1 << P.alpha) if m & self.assert_act[i] == self.assert_act[i]]
                for i in range(P.eta)]
        for f in product(*acts):
            guard = self.root_guard(f)
            for fixed in joint:
                opts = []
                for i in range(P.eta):
                    ts = [fixed[i]] if i in fixed else cands[i]
                    opts.append([("d1", i, f, t) for t in ts])
                if all(opts):
                    yield guard, opts + [(BOX,)] * (P.d - P.eta)

    def root_guard(self, f):
        P = self.P
        parts = []
        for i in range(P.eta):
            for j in range(1, P.alpha + 1):
                if (f[i] >> (j - 1)) & 1:
                    for i2 in range(P.eta):
                        parts.append(Cn.eq(Cn.child(i, j), Cn.child(i2, self.ind_reg(i, j))))
        parts.extend(self.assertion_guard(lambda i: i))
        return Cn.conj(parts)

    # General ----------------------------------------------------------------

    @staticmethod
    def parts(q):
        """(type, act, parent role or None, parent type, parent act)."""
        if q[0] == "d1":
            _, gamma, f, t = q
            return t, f[gamma], None, 0, 0
        _, rup, tup, actup, t, act = q
        return t, act, rup, tup, actup

    def parent_ok(self, q):
        """Value restrictions through the inverse of the incoming role."""
        t, _, rup, tup, _ = self.parts(q)
        if rup is None:
            return True
        return all(self.has(tup, c) for r, c in self.info(t)[0] if r == rup.inverse)

    def child_plan(self, q, i):
        t, act, rup, tup, _ = self.parts(q)
        entries = self.active_entries(t, i)
        role = self.role_at(i)
        if not entries or role is None:
            return False, 0, None, 0
        req = 0
        must = False
        for r, c in self.info(t)[0]:
            if r == role:
                req |= self.cl.bit(c)
        for e in entries:
            if e[0] != "ex":
                continue
            r, c = e[1].role, e[1].arg
            if not (rup is not None and r == rup.inverse and self.has(tup, c)):
                req |= self.cl.bit(c)
                must = True
        return must, req, role, self.relevant_features(t, role)

    def back_ok(self, t, role, t2):
        return all(self.has(t, c) for r, c in self.info(t2)[0] if r == role.inverse)

    def child_choices(self, q, i):
        must, req, role, fmask = self.child_plan(q, i)
        if role is None:
            return [(None, [BOX])]
        t, act, _, _, _ = self.parts(q)
        out = [] if must else [(None, [BOX])]
        out.extend(self.child_groups(role, t & self._up_mask.get(role, 0), act, req, fmask))
        return out

    def child_groups(self, role, tproj, act, req, fmask):
        key = (role, tproj, act, req, fmask)
        got = self._groups_cache.get(key)
        if got is not None:
            return got
        groups = {}
        for t2 in self.types_with(req):
            if not self.back_ok(tproj, role, t2):
                continue
            free = fmask | self.own_features(t2) | self.neighbour_read
            for m in range(1 << self.P.alpha):
                if m & ~free == 0:
                    groups.setdefault(m & fmask, []).append(("in", role, tproj, act, t2, m))
        got = self._groups_cache[key] = [(k, groups[k]) for k in sorted(groups)]
        return got

    def z_sets(self, q, pattern):
        P = self.P
        t, act, rup, _, actup = self.parts(q)
        edges = self.asserted_edges(q[1]) if q[0] == "d1" else []
        f = q[2] if q[0] == "d1" else None

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
                if rup is not None and rup.inverse == p.role and actup & bit:
                    z.append(Cn.parent(l))
                z += [Cn.current(self.ind_reg(b, l)) for r, b in edges if r == p.role and f[b] & bit]
                out.append(z)
            return out

        return zs

    def general_guard(self, q, pattern):
        P = self.P
        t, act, _, _, _ = self.parts(q)
        parts = self.cd_guard(t, self.z_sets(q, pattern))
        for i in range(P.d):
            if pattern[i] is None:
                continue
            for j in _bits(act):
                parts.append(Cn.eq(Cn.child(i, P.alpha + j + 1), Cn.current(j + 1)))
        return Cn.conj(parts)

    def pattern_of(self, q, targets):
        out = []
        for i, q2 in enumerate(targets):
            if q2 == BOX:
                out.append(None)
                continue
            out.append(q2[5] & self.child_plan(q, i)[3])
        return out

    def general_moves(self, q):
        if not self.parent_ok(q):
            return
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
        t, act, rup, tup, actup = self.parts(q)
        alpha = self.P.alpha
        own = f"T={self.cl.show_type(t)} act={_act_str(act, alpha)}"
        if rup is None:
            return f"ind={self.P.individuals[q[1]]} {own}"
        return f"up=({rup} {self.cl.show_type(tup)} {_act_str(actup, alpha)}) {own}"

    def local(self, q):
        t, act, _, _, _ = self.parts(q)
        return set(self.cl.members(t)), set(), {self.P.features[k] for k in _bits(act)}


def compile_automaton_alci(o: S.Ontology, domain, max_transitions=None, max_types=None):
    from .core import make_compiler

    return make_compiler(o, domain, "alci", **_caps(max_transitions, max_types)).build()


def compile_automaton_alcof(o: S.Ontology, domain, functional=None, max_transitions=None, max_types=None):
    from .core import make_compiler

    if functional is not None:
        o = S.Ontology(o.tbox, o.abox, frozenset(functional), o.domain, o.normalized)
    return make_compiler(o, domain, "alcof", **_caps(max_transitions, max_types)).build()


def _caps(max_transitions, max_types):
    kw = {}
    if max_transitions is not None:
        kw["max_transitions"] = max_transitions
    if max_types is not None:
        kw["max_types"] = max_types
    return kw


def compile_constraint_assertions(o: S.Ontology):
    """Root guard conjuncts over the individuals' nodes and, per individual, the features they force."""
    from .core import derive_params, normalize

    if not o.normalized:
        o = normalize(o)
    P = derive_params(o)
    obligations = [0] * P.eta
    parts = []
    for x in o.constraint_assertions():
        m = {}
        for v, feat, a in x.bindings:
            l, i = P.feature_index(feat), P.individual_index(a)
            obligations[i] |= 1 << (l - 1)
            m[Cn.Var(v)] = Cn.child(i, l)
        parts.append(Cn.substitute(x.theta, m))
    return parts, {P.individuals[i]: {P.features[k] for k in _bits(m)} for i, m in enumerate(obligations)}


def functional_closure_ok(o: S.Ontology, part) -> bool:
    """False when the partition keeps apart two targets of one functional role from one source."""
    if o.uses_inverse() and o.functional:
        raise UnsupportedConstruct("inverse and functional roles cannot be combined")
    return _respects_functional(o, part)
