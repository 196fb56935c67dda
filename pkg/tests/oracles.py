"""Independent brute-force oracles built on sympy, used to check the exact solvers."""
import itertools
from fractions import Fraction

import sympy


def _q(x):
    x = sympy.nsimplify(x)
    return Fraction(int(x.p), int(x.q))


def _feasible(x, Aeq, beq, G, h):
    return (all(sum(a * v for a, v in zip(r, x)) == b for r, b in zip(Aeq, beq))
            and all(sum(a * v for a, v in zip(r, x)) <= b for r, b in zip(G, h)))


def face_minimizers(Q, c, Aeq, beq, G, h):
    """For every subset W of inequality rows, a stationary point of the QP restricted to {Aeq x = beq, G_W x = h_W}."""
    n = len(c)
    xs = sympy.symbols(f"x0:{n}")
    out = []
    for k in range(len(G) + 1):
        for W in itertools.combinations(range(len(G)), k):
            rows = [list(r) for r in Aeq] + [list(G[i]) for i in W]
            rhs = list(beq) + [h[i] for i in W]
            lams = sympy.symbols(f"l0:{len(rows)}") if rows else ()
            eqs = []
            for j in range(n):
                e = sum(sympy.Rational(Q[j][t]) * xs[t] for t in range(n)) + sympy.Rational(c[j])
                e -= sum(lams[i] * sympy.Rational(rows[i][j]) for i in range(len(rows)))
                eqs.append(e)
            for r, b in zip(rows, rhs):
                eqs.append(sum(sympy.Rational(a) * v for a, v in zip(r, xs)) - sympy.Rational(b))
            sol = sympy.linsolve(eqs, list(xs) + list(lams))
            if not sol:
                continue
            point = next(iter(sol))
            free = {s: 0 for s in set().union(*(sympy.sympify(p).free_symbols for p in point))}
            x = [_q(sympy.sympify(p).subs(free)) for p in point[:n]]
            if _feasible(x, Aeq, beq, G, h):
                out.append(tuple(x))
    return out


def qp_min(Q, c, Aeq, beq, G, h):
    """Global minimum of a bounded convex QP; every feasible stationary face point is a candidate."""
    n = len(c)
    best = None
    for x in face_minimizers(Q, c, Aeq, beq, G, h):
        z = sum(Fraction(Q[i][j]) * x[i] * x[j] for i in range(n) for j in range(n)) / 2
        z += sum(Fraction(ci) * xi for ci, xi in zip(c, x))
        best = z if best is None or z < best else best
    return best


def lp_vertex_min(c, Aeq, beq, G, h):
    """Minimum of c^T x over the vertices of a bounded polytope."""
    n = len(c)
    zero = [[0] * n for _ in range(n)]
    return qp_min(zero, c, Aeq, beq, G, h)


def mip_box_min(inst):
    """Exhaust the integer box; each continuous piece goes to :func:`qp_min`."""
    M = int(inst.M)
    C = inst.continuous
    Qfull = [list(r) for r in inst.objective.Q] if inst.objective.Q is not None else None
    best = None
    for p in itertools.product(range(-M, M + 1), repeat=inst.n1):
        fixed = dict(zip(inst.integer, p))
        cc = [inst.objective.c[j] + (sum(Qfull[j][i] * v for i, v in fixed.items()) if Qfull is not None else 0)
              for j in C]
        QC = [[Qfull[i][j] if Qfull is not None else 0 for j in C] for i in C]
        const = sum(inst.objective.c[i] * v for i, v in fixed.items())
        if Qfull is not None:
            const += sum(Qfull[i][j] * fixed[i] * fixed[j] for i in fixed for j in fixed) / Fraction(2)
        Aeq = [[r[j] for j in C] for r in inst.A]
        beq = [b - sum(r[i] * v for i, v in fixed.items()) for r, b in zip(inst.A, inst.b)]
        G = [[r[j] for j in C] for r in inst.E]
        h = [f - sum(r[i] * v for i, v in fixed.items()) for r, f in zip(inst.E, inst.f_rhs)]
        if C:
            z = qp_min(QC, cc, Aeq, beq, G, h)
        else:
            z = Fraction(0) if _feasible([], Aeq, beq, G, h) and all(v == 0 for v in beq) else None
        if z is not None:
            z += const + inst.objective.const
            best = z if best is None or z < best else best
    return best
