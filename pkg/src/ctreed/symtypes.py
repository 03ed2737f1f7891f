"""Symbolic types: complete polarity assignments over an atom universe.

The universe for register count ``beta`` and degree ``d`` contains every atom
P(y1..yk) with each yi among the registers of the current node and its ``d``
children. A type is an int bit vector over that universe (bit set = positive).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from . import constraints as C
from .errors import AtomOutsideUniverse, ArityMismatch, BudgetExceeded, UniverseMismatch

DEFAULT_ATOM_CAP = 4096
DEFAULT_TYPE_BUDGET = 200_000


def universe_size(preds, beta, d):
    n = beta * (d + 1)
    return sum(n ** p.arity for p in preds)


class AtomUniverse:
    """Ordered atoms over Registers(beta, d); ``d = 0`` gives current registers only."""

    def __init__(self, preds, beta: int, d: int):
        self.preds = tuple(sorted(set(preds), key=C.pred_key))
        self.beta = beta
        self.d = d
        self.registers = [C.current(j) for j in range(1, beta + 1)]
        for i in range(d):
            self.registers.extend(C.child(i, j) for j in range(1, beta + 1))
        self.atoms = []
        for p in self.preds:
            for args in product(self.registers, repeat=p.arity):
                self.atoms.append(C.Atom(p, args))
        self.index = {a: k for k, a in enumerate(self.atoms)}
        # Positions of current-only atoms and their per-child counterparts.
        self.cur_idx = []
        self.child_idx = [[] for _ in range(d)]
        for k, a in enumerate(self.atoms):
            if all(r.child is None for r in a.args):
                self.cur_idx.append(k)
                for i in range(d):
                    twin = C.Atom(a.pred, tuple(C.child(i, r.index) for r in a.args))
                    self.child_idx[i].append(self.index[twin])

    @property
    def key(self):
        return (self.preds, self.beta, self.d)

    def __len__(self):
        return len(self.atoms)

    def __eq__(self, other):
        return isinstance(other, AtomUniverse) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"AtomUniverse(preds={[str(p) for p in self.preds]}, beta={self.beta}, d={self.d}, size={len(self)})"


def atom_universe(preds, beta: int, d: int, cap: int = DEFAULT_ATOM_CAP) -> AtomUniverse:
    n = universe_size(preds, beta, d)
    if n > cap:
        raise BudgetExceeded(f"atom universe of size {n} exceeds the cap {cap}")
    return AtomUniverse(preds, beta, d)


@dataclass(frozen=True)
class SymbolicType:
    universe: AtomUniverse
    bits: int

    def polarity(self, atom) -> bool:
        try:
            k = self.universe.index[atom]
        except KeyError:
            raise AtomOutsideUniverse(f"{C.atom_sexpr(atom)} is not in the universe") from None
        return bool((self.bits >> k) & 1)

    def literals(self) -> frozenset:
        b = self.bits
        return frozenset(C.Literal(a, bool((b >> k) & 1)) for k, a in enumerate(self.universe.atoms))

    def current_literals(self) -> frozenset:
        b = self.bits
        atoms = self.universe.atoms
        return frozenset(C.Literal(atoms[k], bool((b >> k) & 1)) for k in self.universe.cur_idx)


def _gather(bits, positions):
    key = 0
    for n, p in enumerate(positions):
        if (bits >> p) & 1:
            key |= 1 << n
    return key


def current_key(tau: SymbolicType) -> int:
    """Bits of the current-register atoms, packed in universe order."""
    return _gather(tau.bits, tau.universe.cur_idx)


def child_key(tau: SymbolicType, i: int) -> int:
    """Bits of child ``i``'s atoms, packed in the same order as :func:`current_key`."""
    return _gather(tau.bits, tau.universe.child_idx[i])


def type_of_values(domain, z, children, u: AtomUniverse) -> SymbolicType:
    z = tuple(z)
    children = [tuple(c) for c in children]
    if len(z) != u.beta or len(children) != u.d or any(len(c) != u.beta for c in children):
        raise ArityMismatch("value tuples do not match the universe's beta and d")
    val = {}
    for j in range(1, u.beta + 1):
        val[C.current(j)] = z[j - 1]
        for i, c in enumerate(children):
            val[C.child(i, j)] = c[j - 1]
    bits = 0
    for k, a in enumerate(u.atoms):
        if domain.holds(a.pred, [val[x] for x in a.args]):
            bits |= 1 << k
    return SymbolicType(u, bits)


def is_satisfiable_type(domain, tau: SymbolicType) -> bool:
    return domain.satisfiable(tau.literals())


def entails(tau: SymbolicType, theta) -> bool:
    """Boolean evaluation of ``theta`` reading atom truth values from ``tau``."""
    if isinstance(theta, C.Truth):
        return theta.value
    if isinstance(theta, C.Atom):
        return tau.polarity(theta)
    if isinstance(theta, C.Not):
        return not entails(tau, theta.arg)
    if isinstance(theta, C.And):
        return all(entails(tau, a) for a in theta.args)
    if isinstance(theta, C.Or):
        return any(entails(tau, a) for a in theta.args)
    raise TypeError(f"not a constraint: {theta!r}")


def projection_compatible(tau: SymbolicType, children) -> bool:
    u = tau.universe
    if len(children) != u.d:
        raise UniverseMismatch(f"expected {u.d} child types, got {len(children)}")
    for i, c in enumerate(children):
        if c.universe != u:
            raise UniverseMismatch("child type over a different universe")
        if child_key(tau, i) != current_key(c):
            return False
    return True


def enumerate_satisfiable_types(domain, u: AtomUniverse, budget: int = DEFAULT_TYPE_BUDGET):
    """Yield every satisfiable type of ``u`` once, in a fixed order.

    Backtracks over atom polarities in index order, positive first, and
    abandons any partial assignment whose literal system is unsatisfiable.
    """
    atoms = u.atoms
    n = len(atoms)
    lits = []
    count = 0
    # Each frame: (depth, bits, next polarity to try).
    stack = [(0, 0, True)]
    while stack:
        k, bits, polarity = stack.pop()
        del lits[k:]
        if k == n:
            count += 1
            if count > budget:
                raise BudgetExceeded(f"more than {budget} satisfiable types")
            yield SymbolicType(u, bits)
            continue
        if polarity:
            stack.append((k, bits, False))
            lits.append(C.Literal(atoms[k], True))
            if domain.satisfiable(lits):
                stack.append((k + 1, bits | (1 << k), True))
            else:
                # The parent is satisfiable, so the negative branch must be too.
                stack.pop()
                lits[k] = C.Literal(atoms[k], False)
                stack.append((k + 1, bits, True))
        else:
            lits.append(C.Literal(atoms[k], False))
            if domain.satisfiable(lits):
                stack.append((k + 1, bits, True))


def satisfiable_types(domain, u: AtomUniverse, budget: int = DEFAULT_TYPE_BUDGET) -> list:
    return list(enumerate_satisfiable_types(domain, u, budget))
