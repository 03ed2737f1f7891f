"""Command-line front end: ``ctreed check|emptiness|csp|stats FILE``.

Output is ``key=value`` lines. ``--machine`` keeps only the stable lines, so
identical inputs give byte-identical output. Exit status: 0 for a positive
verdict (consistent, nonempty, sat), 1 for a negative one, 2 for errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import constraints as C
from . import tgca as T
from .domains import domain_ids, get_domain
from .dl import core
from .dl import syntax as S
from .errors import CtreedError
from .sexpr import SList, Sym, fail, read_all
from .symtypes import DEFAULT_ATOM_CAP, DEFAULT_TYPE_BUDGET

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    path: str
    domain: str | None
    logic: str
    una: bool
    witness_depth: int | None
    max_atoms: int
    max_types: int
    max_transitions: int
    machine: bool


def _positive(text):
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def _depth(text):
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError("must be at least 0")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="ctreed", description="Consistency for description logics with concrete domains.")
    p.add_argument("command", choices=["check", "emptiness", "csp", "stats"])
    p.add_argument("path")
    p.add_argument("--domain", choices=domain_ids(), help="overrides the (domain ...) form of the input")
    p.add_argument("--logic", choices=["alco", "alci", "alcof"], default="alco")
    p.add_argument("--una", action="store_true", help="assume distinct names denote distinct elements")
    p.add_argument("--witness-depth", type=_depth)
    p.add_argument("--max-atoms", type=_positive, default=DEFAULT_ATOM_CAP)
    p.add_argument("--max-types", type=_positive, default=DEFAULT_TYPE_BUDGET)
    p.add_argument("--max-transitions", type=_positive, default=T.DEFAULT_TRANSITION_CAP)
    p.add_argument("--machine", action="store_true", help="stable key=value lines only")
    return p


def _stats_line(rep):
    return "stats=" + ",".join(f"{k}:{v}" for k, v in rep.items())


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _domain_for(cfg, declared):
    return get_domain(cfg.domain or declared or "dense")


def _witness_lines(a, wit, describe=None):
    tree, run = wit
    lines = T.format_witness(a, tree, run).splitlines()
    if describe is not None:
        seen = set()
        for p in T.tree_paths(tree.degree, max(tree.depth - 1, 0)):
            for q in (run.runs[p].source,) + tuple(run.runs[p].targets):
                if q not in seen:
                    seen.add(q)
                    lines.append(f"location {a.name(q)} {describe(q)}")
    return lines


def cmd_check(cfg, out):
    o = S.parse_ontology(_read(cfg.path))
    dom = _domain_for(cfg, o.domain)
    v = core.check_consistency(o, dom, cfg.logic, cfg.una, cfg.witness_depth, cfg.max_atoms, cfg.max_types,
                               cfg.max_transitions)
    rep = T.stats(v.automaton, enumerate_types=False) if v.automaton is not None else None
    part = core.format_partition(v.partition) if v.partition else "none"
    line = f"verdict={'consistent' if v.consistent else 'inconsistent'} partition={part}"
    if rep is not None:
        line += " " + _stats_line(rep)
    out.append(line)
    if not cfg.machine and v.compiler is not None:
        out.append(f"partitions_tried={v.tried}")
        out.extend(f"{k}={val}" for k, val in v.compiler.P.items())
        out.extend(v.compiler.P.lambda_table())
    if v.consistent and v.witness is not None:
        out.extend(_witness_lines(v.automaton, v.witness, v.compiler.describe))
    return EXIT_OK if v.consistent else EXIT_NEGATIVE


def cmd_emptiness(cfg, out):
    text = _read(cfg.path)
    a = T.parse_tgca(text, get_domain(cfg.domain) if cfg.domain else None)
    T.require_valid(a)
    res = T.nonemptiness(a, "local", cfg.max_atoms, cfg.max_types, cfg.max_transitions)
    out.append(f"verdict={'nonempty' if res.nonempty else 'empty'}")
    if not cfg.machine:
        out.append(_stats_line(T.stats(a, enumerate_types=False)))
    if res.nonempty and cfg.witness_depth is not None:
        wit = T.concretize_witness(a, res, cfg.witness_depth)
        out.extend(_witness_lines(a, wit))
        out.append(f"witness_checked={str(T.check_run_prefix(a, *wit)).lower()}")
    return EXIT_OK if res.nonempty else EXIT_NEGATIVE


def parse_system(text):
    """A literal system: one literal per form, plus an optional ``(domain id)``."""
    declared = None
    lits = []
    for form in read_all(text):
        if isinstance(form, SList) and form and form[0] == "domain":
            if len(form) != 2 or not isinstance(form[1], Sym):
                fail(form, "domain takes one identifier")
            declared = str(form[1])
            continue
        theta = C.parse_constraint(form)
        if isinstance(theta, C.Atom):
            lits.append(C.pos(theta))
        elif isinstance(theta, C.Not) and isinstance(theta.arg, C.Atom):
            lits.append(C.neg(theta.arg))
        else:
            fail(form, "expected a literal")
    return declared, lits


def cmd_csp(cfg, out):
    declared, lits = parse_system(_read(cfg.path))
    dom = _domain_for(cfg, declared)
    for l in lits:
        dom.check(l.atom.pred)
    model = dom.model(lits)
    if model is None:
        out.append("verdict=unsat")
        return EXIT_NEGATIVE
    theta = C.conj(C.literal_formula(l) for l in lits)
    ok = C.evaluate(theta, model, dom)
    out.append("verdict=sat")
    for v in sorted(model, key=C.var_key):
        out.append(f"model {v}={dom.format_value(model[v])}")
    out.append(f"certified={str(ok).lower()}")
    return EXIT_OK


def cmd_stats(cfg, out):
    text = _read(cfg.path)
    forms = read_all(text)
    if forms and isinstance(forms[0], SList) and forms[0] and forms[0][0] in ("tgca", "bta"):
        a = T.parse_tgca(text, get_domain(cfg.domain) if cfg.domain else None)
        T.require_valid(a)
    else:
        o = S.parse_ontology(text)
        dom = _domain_for(cfg, o.domain)
        comp = core.make_compiler(core.normalize(o), dom, cfg.logic, cfg.max_transitions, cfg.max_types)
        out.extend(f"{k}={v}" for k, v in comp.P.items())
        out.extend(comp.P.lambda_table())
        a = comp.build()
    rep = T.stats(a, enumerate_types=not cfg.machine, max_atoms=cfg.max_atoms, max_types=cfg.max_types)
    out.extend(f"{k}={v}" for k, v in rep.items())
    out.append(f"atoms<=bound: {str(rep.bound_holds()).lower()}")
    return EXIT_OK


COMMANDS = {"check": cmd_check, "emptiness": cmd_emptiness, "csp": cmd_csp, "stats": cmd_stats}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ns = build_parser().parse_args(argv)
    cfg = RunConfig(ns.command, ns.path, ns.domain, ns.logic, ns.una, ns.witness_depth, ns.max_atoms, ns.max_types,
                    ns.max_transitions, ns.machine)
    out = []
    try:
        status = COMMANDS[cfg.command](cfg, out)
    except CtreedError as e:
        out.append(f"error={e.code}")
        print(f"ctreed: {e}", file=stderr)
        status = EXIT_ERROR
    except OSError as e:
        out.append("error=IOError")
        print(f"ctreed: {e}", file=stderr)
        status = EXIT_ERROR
    except RecursionError:
        out.append("error=ResourceExceeded")
        print("ctreed: input nested too deeply", file=stderr)
        status = EXIT_ERROR
    for line in out:
        print(line, file=stdout)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
