"""An automaton over data trees whose only runs carry strictly increasing values down every branch."""

from ctreed import constraints as C
from ctreed import domains as D
from ctreed import tgca as T

x1 = C.current(1)


def build(degree):
    guard = C.conj(C.lt(x1, C.child(i, 1)) for i in range(degree))
    step = T.Transition("q", "a", guard, ("q",) * degree)
    return T.Tgca.from_transitions(["q"], ["a"], degree, 1, ["q"], ["q"], [step], D.DENSE)


def main():
    for degree in (1, 2):
        a = build(degree)
        res = T.nonemptiness(a)
        print(f"degree {degree}: {'nonempty' if res.nonempty else 'empty'}")
        tree, run = T.concretize_witness(a, res, 3)
        print("  prefix accepted:", T.check_run_prefix(a, tree, run))
        for path in sorted(tree.nodes, key=lambda p: (len(p), p)):
            print(f"  {T.path_name(path):>4} x1={tree.nodes[path][1][0]}")
    # Asking for a child both above and below its parent leaves no run.
    clash = C.conj([C.lt(x1, C.child(0, 1)), C.lt(C.child(0, 1), x1)])
    a = T.Tgca.from_transitions(["q"], ["a"], 1, 1, ["q"], ["q"], [T.Transition("q", "a", clash, ("q",))], D.DENSE)
    print("contradictory guard:", "nonempty" if T.nonemptiness(a).nonempty else "empty")


if __name__ == "__main__":
    main()
