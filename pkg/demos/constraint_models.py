"""Solve literal systems in the three shipped domains and certify the models."""

from fractions import Fraction

from ctreed import constraints as C
from ctreed import domains as D

x, y, z = C.Var("x"), C.Var("y"), C.Var("z")

SYSTEMS = {
    "dense": [C.pos(C.lt(x, y)), C.pos(C.lt(y, z)), C.neg(C.eq(x, z))],
    "eq": [C.neg(C.eq(x, y)), C.neg(C.eq(y, z)), C.pos(C.eq(x, z))],
    "dense-const": [C.pos(C.Atom(C.Predicate("gtC", 1, Fraction(17)), (x,))),
                    C.pos(C.Atom(C.Predicate("ltC", 1, Fraction(18)), (x,))), C.pos(C.lt(x, y))],
}


def main():
    for name, lits in SYSTEMS.items():
        dom = D.get_domain(name)
        model = D.solve_model(dom, lits)
        if model is None:
            print(f"{name}: unsat")
            continue
        shown = ", ".join(f"{v}={dom.format_value(model[v])}" for v in sorted(model, key=C.var_key))
        ok = all(C.evaluate(C.literal_formula(l), model, dom) for l in lits)
        print(f"{name}: {shown} (certified: {ok})")
    cycle = [C.pos(C.lt(x, y)), C.pos(C.lt(y, z)), C.pos(C.lt(z, x))]
    print("strict cycle:", "sat" if D.dense_order_decide(cycle) else "unsat")


if __name__ == "__main__":
    main()
