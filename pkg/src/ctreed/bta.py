"""Büchi and looping tree automata, decided as two-player games.

Eve picks a transition at a state; Adam picks a direction. The solvers work on
an index-based arena in which every option of a state is a tuple of target
groups, one group per direction; Eve also picks one member of each group.
A plain automaton is the special case where every group is a singleton.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import InvalidStrategy, PreconditionViolated


@dataclass(frozen=True)
class BtaTransition:
    source: object
    letter: str
    targets: tuple


@dataclass
class Bta:
    states: tuple
    alphabet: tuple
    degree: int
    initial: frozenset
    accepting: frozenset
    transitions: tuple
    _index: dict = field(default=None, repr=False, compare=False)

    def state_index(self):
        if self._index is None:
            self._index = {q: k for k, q in enumerate(self.states)}
        return self._index

    def validate(self):
        defects = []
        idx = self.state_index()
        for q in self.initial | self.accepting:
            if q not in idx:
                defects.append(f"unknown state {q!r}")
        for k, t in enumerate(self.transitions):
            if t.source not in idx or any(q not in idx for q in t.targets):
                defects.append(f"transition {k}: unknown state")
            if len(t.targets) != self.degree:
                defects.append(f"transition {k}: expected {self.degree} targets")
            if t.letter not in self.alphabet:
                defects.append(f"transition {k}: letter {t.letter!r} not in alphabet")
        return defects


@dataclass(frozen=True)
class Strategy:
    """Memoryless choice: surviving state -> index into ``Bta.transitions``."""

    choice: dict

    def dump(self):
        return "\n".join(f"state {q} -> trans {k}" for q, k in self.choice.items())


@dataclass(frozen=True)
class Empty:
    nonempty = False


@dataclass(frozen=True)
class Nonempty:
    strategy: object
    initial: object
    nonempty = True


# -- arena solvers -----------------------------------------------------------


class Arena:
    """Options per state; each option is a tuple of groups, each group a tuple of state ids."""

    def __init__(self, n: int):
        self.n = n
        self.options = [[] for _ in range(n)]

    def add(self, s: int, groups: tuple):
        self.options[s].append(groups)


def _group_table(arena):
    """Intern groups: returns (group list, per-option group ids, membership lists)."""
    gid = {}
    groups = []
    opt_groups = []
    for s in range(arena.n):
        row = []
        for opt in arena.options[s]:
            ids = []
            for g in opt:
                k = gid.get(g)
                if k is None:
                    k = gid[g] = len(groups)
                    groups.append(g)
                ids.append(k)
            row.append(ids)
        opt_groups.append(row)
    member_of = [[] for _ in range(arena.n)]
    for k, g in enumerate(groups):
        for s in set(g):
            member_of[s].append(k)
    group_opts = [[] for _ in groups]
    for s in range(arena.n):
        for o, ids in enumerate(opt_groups[s]):
            for k in set(ids):
                group_opts[k].append((s, o))
    return groups, opt_groups, member_of, group_opts


def _first_member(g, alive):
    for s in g:
        if alive[s]:
            return s
    return None


def solve_safety(arena: Arena, alive=None):
    """Greatest fixpoint: states with an option whose every group meets the survivors.

    Returns (alive flags, choice) where choice[s] = (option index, members).
    """
    groups, opt_groups, member_of, group_opts = _group_table(arena)
    n = arena.n
    alive = [True] * n if alive is None else list(alive)
    gcount = [sum(1 for s in set(g) if alive[s]) for g in groups]
    dead_groups = [[sum(1 for k in set(ids) if gcount[k] == 0) for ids in row] for row in opt_groups]
    live_opts = [sum(1 for c in row if c == 0) for row in dead_groups]
    queue = deque(s for s in range(n) if alive[s] and live_opts[s] == 0)
    for s in queue:
        alive[s] = False
    while queue:
        s = queue.popleft()
        for k in member_of[s]:
            gcount[k] -= 1
            if gcount[k] == 0:
                for owner, o in group_opts[k]:
                    dead_groups[owner][o] += 1
                    if dead_groups[owner][o] == 1:
                        live_opts[owner] -= 1
                        if live_opts[owner] == 0 and alive[owner]:
                            alive[owner] = False
                            queue.append(owner)
    choice = {}
    for s in range(n):
        if not alive[s]:
            continue
        for o, opt in enumerate(arena.options[s]):
            members = [_first_member(g, alive) for g in opt]
            if all(m is not None for m in members):
                choice[s] = (o, tuple(members))
                break
    return alive, choice


def solve_buchi(arena: Arena, accepting):
    """Winning region of the Büchi game, with a memoryless winning choice.

    Outer greatest fixpoint over Z, inner attractor towards accepting states
    that can move into Z. Non-accepting states pick an option whose members
    have strictly smaller attractor rank, so every play revisits F.
    """
    groups, opt_groups, member_of, group_opts = _group_table(arena)
    n = arena.n
    acc = [bool(accepting[s]) for s in range(n)]
    inz = [True] * n
    while True:
        iny = [False] * n
        choice = {}
        queue = deque()
        for s in range(n):
            if not acc[s]:
                continue
            for o, opt in enumerate(arena.options[s]):
                members = [_first_member(g, inz) for g in opt]
                if all(m is not None for m in members):
                    iny[s] = True
                    choice[s] = (o, tuple(members))
                    queue.append(s)
                    break
        ycount = [0] * len(groups)
        witness = [None] * len(groups)
        missing = [[len(set(ids)) for ids in row] for row in opt_groups]
        while queue:
            s = queue.popleft()
            for k in member_of[s]:
                ycount[k] += 1
                if ycount[k] != 1:
                    continue
                witness[k] = s
                for owner, o in group_opts[k]:
                    missing[owner][o] -= 1
                    if missing[owner][o] == 0 and not iny[owner]:
                        iny[owner] = True
                        ids = opt_groups[owner][o]
                        choice[owner] = (o, tuple(witness[g] for g in ids))
                        queue.append(owner)
        if iny == inz:
            return iny, choice
        inz = iny


# -- automaton-level API -----------------------------------------------------


def _arena_of(b: Bta):
    idx = b.state_index()
    arena = Arena(len(b.states))
    owners = [[] for _ in b.states]
    for k, t in enumerate(b.transitions):
        s = idx[t.source]
        arena.add(s, tuple((idx[q],) for q in t.targets))
        owners[s].append(k)
    return arena, owners


def _result(b, alive, choice, owners):
    idx = b.state_index()
    start = None
    for q in sorted(b.initial, key=idx.__getitem__):
        if alive[idx[q]]:
            start = q
            break
    if start is None:
        return Empty()
    strategy = {b.states[s]: owners[s][o] for s, (o, _) in sorted(choice.items()) if alive[s]}
    return Nonempty(Strategy(strategy), start)


def looping_nonemptiness(b: Bta):
    if set(b.accepting) != set(b.states):
        raise PreconditionViolated("looping emptiness needs every state accepting")
    arena, owners = _arena_of(b)
    alive, choice = solve_safety(arena)
    return _result(b, alive, choice, owners)


def buchi_nonemptiness(b: Bta):
    arena, owners = _arena_of(b)
    idx = b.state_index()
    acc = [False] * len(b.states)
    for q in b.accepting:
        acc[idx[q]] = True
    win, choice = solve_buchi(arena, acc)
    return _result(b, win, choice, owners)


def unfold(b: Bta, s: Strategy, depth: int, start=None):
    """Complete d-ary tree of depth ``depth`` following ``s``: path -> (state, letter)."""
    if start is None:
        idx = b.state_index()
        starts = sorted((q for q in b.initial if q in s.choice), key=idx.__getitem__)
        if not starts:
            raise InvalidStrategy("no initial state is covered by the strategy")
        start = starts[0]
    tree = {}
    frontier = [((), start)]
    for level in range(depth + 1):
        nxt = []
        for path, q in frontier:
            if q not in s.choice:
                raise InvalidStrategy(f"strategy has no move at state {q!r}")
            k = s.choice[q]
            if not 0 <= k < len(b.transitions) or b.transitions[k].source != q:
                raise InvalidStrategy(f"strategy picks transition {k}, which does not leave {q!r}")
            t = b.transitions[k]
            tree[path] = (q, t.letter)
            if level < depth:
                nxt.extend((path + (i,), t.targets[i]) for i in range(b.degree))
        frontier = nxt
    return tree
