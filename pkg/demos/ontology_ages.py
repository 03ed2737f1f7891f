"""Check a small patient ontology over rationals with constants and print the witness ages."""

from ctreed import domains as D
from ctreed.dl import core
from ctreed.dl import syntax as S

ONTOLOGY = """
(sub Patient (cd-all ((v age)) (ltC 18 v)))
(sub Patient (some hasParent Guardian))
(sub Guardian (cd-some ((v age) (w (hasChild age))) (lt w v)))
(instance ann Patient)
(assert-constraint (gtC 10 (age ann)))
"""


def main():
    o = S.parse_ontology(ONTOLOGY)
    v = core.check_consistency(o, D.DENSE_CONST, witness_depth=4)
    print("consistent:", v.consistent)
    if not v.consistent:
        return
    tree, run = v.witness
    P = v.compiler.P
    age = P.feature_index("age") - 1
    for path in sorted(tree.nodes, key=lambda p: (len(p), p)):
        if not path or path not in run.runs:
            continue
        q = run.runs[path].source
        if q in (core.ROOT, core.BOX):
            continue
        concepts, _, defined = v.compiler.local(q)
        names = sorted(str(c) for c in concepts if isinstance(c, S.Name))
        if "age" in defined:
            print(f"node {path}: {' '.join(names) or '-'} age={D.DENSE_CONST.format_value(tree.nodes[path][1][age])}")


if __name__ == "__main__":
    main()
