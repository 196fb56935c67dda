"""Problem instances, validation, standard-form transforms and recession checks.

Objective sign convention: every objective is stored as a plain minimization
``f(x) = 1/2 x^T Q x + c^T x + const`` (Q absent for linear kinds).  The
quadratic programs elsewhere in the literature are often written with a
``- c^T x`` term; only norms of ``c`` enter the penalty constants, so the two
conventions give identical constants.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ArgumentError, InstanceError, Undecidable, Unsupported
from .exactnum import as_rational, dot, format_rational
from .oracles import SmoothOracle, make_oracle
from .ratlinalg import RatMatrix

KINDS = ("linear", "quadratic", "oracle")


def _vec(v) -> tuple:
    return tuple(as_rational(x) for x in v)


def psd_certificate(Q: RatMatrix):
    """Exact symmetric-pivoted LDL^T.  Returns (is_psd, pivots)."""
    a = [list(r) for r in Q]
    n = len(a)
    alive = list(range(n))
    pivots = []
    while alive:
        diag = [(a[i][i], i) for i in alive]
        if any(d < 0 for d, _ in diag):
            return False, pivots + [min(diag)[0]]
        pos = [i for d, i in diag if d > 0]
        if not pos:
            # zero diagonal: PSD requires the remaining block to vanish
            ok = all(a[i][j] == 0 for i in alive for j in alive)
            return ok, pivots + [Fraction(0)] * len(alive)
        k = pos[0]
        d = a[k][k]
        pivots.append(d)
        alive.remove(k)
        col = {i: a[i][k] for i in alive}
        for i in alive:
            if col[i] == 0:
                continue
            for j in alive:
                a[i][j] -= col[i] * col[j] / d
    return True, pivots


@dataclass(frozen=True, eq=False)
class Objective:
    """f(x) = 1/2 x^T Q x + c^T x + const (+ oracle(selected coordinates))."""

    kind: str
    c: tuple
    Q: RatMatrix | None = None
    const: Fraction = Fraction(0)
    oracle: SmoothOracle | None = None
    # oracle input i is x[oracle_sel[i]], or oracle_fill[i] when the selector is None
    oracle_sel: tuple | None = None
    oracle_fill: tuple | None = None

    @property
    def n(self):
        return len(self.c)

    @property
    def exact(self):
        return self.kind in ("linear", "quadratic")

    @property
    def mu(self) -> float:
        """Strong convexity modulus with respect to all variables (0 if unknown)."""
        if self.kind == "oracle":
            if sorted(s for s in self.oracle_sel if s is not None) == list(range(self.n)):
                return float(self.oracle.mu)
            return 0.0
        if self.kind == "linear":
            return 0.0
        return float("nan")

    def strong_split(self):
        """(S, N, mu_S): f is mu_S-strongly convex in the coordinates S and linear in N."""
        if self.kind == "oracle":
            S = tuple(sorted(s for s in self.oracle_sel if s is not None))
            N = tuple(j for j in range(self.n) if j not in set(S))
            return S, N, float(self.oracle.mu)
        if self.kind == "linear":
            return (), tuple(range(self.n)), 0.0
        return tuple(range(self.n)), (), 0.0

    @property
    def L(self) -> float:
        return float(self.oracle.L) if self.kind == "oracle" else float("nan")

    def _oracle_input(self, x):
        return np.array(
            [float(x[s]) if s is not None else fill for s, fill in zip(self.oracle_sel, self.oracle_fill)]
        )

    def value(self, x):
        if self.kind == "oracle":
            lin = float(sum(float(ci) * float(xi) for ci, xi in zip(self.c, x)))
            return self.oracle.value(self._oracle_input(x)) + lin + float(self.const)
        x = _vec(x)
        val = dot(self.c, x) + self.const
        if self.Q is not None:
            val += dot(x, self.Q @ x) / 2
        return val

    def grad(self, x):
        if self.kind == "oracle":
            g = np.array([float(ci) for ci in self.c])
            og = self.oracle.grad(self._oracle_input(x))
            for i, s in enumerate(self.oracle_sel):
                if s is not None:
                    g[s] += og[i]
            return g
        x = _vec(x)
        g = list(self.c)
        if self.Q is not None:
            g = [gi + qi for gi, qi in zip(g, self.Q @ x)]
        return tuple(g)

    def add_terms(self, dc=None, dconst=0, dQ: RatMatrix | None = None) -> "Objective":
        c = self.c if dc is None else tuple(a + as_rational(b) for a, b in zip(self.c, dc))
        Q, kind = self.Q, self.kind
        if dQ is not None:
            if kind == "oracle":
                raise Unsupported("cannot add a quadratic term to an oracle objective")
            Q = dQ if Q is None else Q + dQ
            kind = "quadratic"
        return replace(self, c=c, Q=Q, kind=kind, const=self.const + as_rational(dconst))

    def extended(self, extra_c: Sequence) -> "Objective":
        """Append variables that enter the objective linearly."""
        extra_c = _vec(extra_c)
        k = len(extra_c)
        Q = self.Q
        if Q is not None:
            n = self.n
            Q = RatMatrix([list(r) + [0] * k for r in Q] + [[0] * (n + k) for _ in range(k)], cols=n + k)
        return replace(self, c=self.c + extra_c, Q=Q)

    def restricted(self, fixed: dict) -> "Objective":
        """Objective in the remaining variables after fixing ``{index: value}``."""
        free = [j for j in range(self.n) if j not in fixed]
        pos = {j: k for k, j in enumerate(free)}
        fixed = {j: as_rational(v) for j, v in fixed.items()}
        const = self.const + sum((self.c[j] * v for j, v in fixed.items()), Fraction(0))
        c = [self.c[j] for j in free]
        Q = None
        if self.Q is not None:
            for j, v in fixed.items():
                for k in free:
                    c[pos[k]] += self.Q[k, j] * v
            const += sum((self.Q[i, j] * vi * vj for i, vi in fixed.items() for j, vj in fixed.items()), Fraction(0)) / 2
            Q = RatMatrix([[self.Q[i, j] for j in free] for i in free], cols=len(free))
        sel, fill = self.oracle_sel, self.oracle_fill
        if self.kind == "oracle":
            fill = tuple(float(fixed[s]) if s in fixed else f for s, f in zip(sel, fill))
            sel = tuple(None if (s is None or s in fixed) else pos[s] for s in sel)
        return replace(self, c=tuple(c), Q=Q, const=const, oracle_sel=sel, oracle_fill=fill)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "c": [format_rational(x) for x in self.c]}
        if self.Q is not None:
            out["Q"] = [[format_rational(x) for x in r] for r in self.Q]
        if self.const != 0:
            out["const"] = format_rational(self.const)
        if self.oracle is not None:
            out["oracle"] = {"name": self.oracle.name, "params": self.oracle.params}
        return out


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """min f(x) s.t. A x = b, E x <= f_rhs, x_j integer for j in ``integer``, |x_I|_inf <= M."""

    A: RatMatrix
    b: tuple
    E: RatMatrix
    f_rhs: tuple
    integer: tuple
    objective: Objective
    M: Fraction | None = None
    name: str = ""
    attest_recession: bool = False

    @property
    def n(self):
        return self.A.cols

    @property
    def m(self):
        return self.A.rows

    @property
    def p(self):
        return self.E.rows

    @property
    def continuous(self) -> tuple:
        ints = set(self.integer)
        return tuple(j for j in range(self.n) if j not in ints)

    @property
    def n1(self):
        return len(self.integer)

    @property
    def n2(self):
        return self.n - self.n1

    @property
    def kind(self):
        return self.objective.kind

    @property
    def is_pure_integer(self):
        return self.n2 == 0

    def with_b(self, b) -> "ProblemInstance":
        return replace(self, b=_vec(b))

    def shifted(self, u) -> "ProblemInstance":
        """Instance with right-hand side b + u (the hyperplane H_u)."""
        u = _vec(u)
        if len(u) != self.m:
            raise ArgumentError(f"perturbation has length {len(u)}, expected {self.m}")
        return replace(self, b=tuple(bi + ui for bi, ui in zip(self.b, u)))

    def box_rows(self):
        """Rows (G, h) encoding |x_j| <= M for integer j; empty without M."""
        if self.M is None:
            return [], []
        G, h = [], []
        for j in self.integer:
            for s in (1, -1):
                row = [Fraction(0)] * self.n
                row[j] = Fraction(s)
                G.append(row)
                h.append(self.M)
        return G, h

    def ineq_with_box(self):
        G, h = self.box_rows()
        return RatMatrix([*self.E, *G], cols=self.n), tuple(self.f_rhs) + tuple(h)

    def is_feasible_point(self, x) -> bool:
        x = _vec(x)
        if len(x) != self.n:
            return False
        if any(x[j].denominator != 1 for j in self.integer):
            return False
        if self.M is not None and any(abs(x[j]) > self.M for j in self.integer):
            return False
        if self.A @ x != self.b:
            return False
        return all(lhs <= rhs for lhs, rhs in zip(self.E @ x, self.f_rhs))

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "n": self.n,
            "A": [[format_rational(x) for x in r] for r in self.A],
            "b": [format_rational(x) for x in self.b],
            "E": [[format_rational(x) for x in r] for r in self.E],
            "f": [format_rational(x) for x in self.f_rhs],
            "integer_indices": list(self.integer),
            "objective": self.objective.to_dict(),
        }
        if self.M is not None:
            out["M"] = format_rational(self.M)
        if self.attest_recession:
            out["attest_recession"] = True
        return out


def _matrix(raw, n, path, violations, allow_missing=True):
    if raw is None:
        if not allow_missing:
            violations.append((path, "missing"))
        return RatMatrix.empty(n)
    try:
        rows = [[as_rational(x) for x in row] for row in raw]
    except Exception as exc:  # noqa: BLE001 - reported as a diagnostic
        violations.append((path, f"non-rational entry ({exc})"))
        return RatMatrix.empty(n)
    for i, row in enumerate(rows):
        if len(row) != n:
            violations.append((f"{path}[{i}]", f"has {len(row)} columns, expected {n}"))
            return RatMatrix.empty(n)
    return RatMatrix(rows, cols=n)


def _vector(raw, length, path, violations):
    if raw is None:
        raw = []
    try:
        v = tuple(as_rational(x) for x in raw)
    except Exception as exc:  # noqa: BLE001
        violations.append((path, f"non-rational entry ({exc})"))
        return tuple(Fraction(0) for _ in range(length))
    if len(v) != length:
        violations.append((path, f"has length {len(v)}, expected {length}"))
        return tuple(Fraction(0) for _ in range(length))
    return v


def validate(raw: dict, require_M: bool = False) -> ProblemInstance:
    """Check raw instance data and build a ProblemInstance.

    Raises InstanceError carrying every violation as a (field_path, message) pair.
    """
    violations = []
    obj = raw.get("objective") or {}
    kind = obj.get("kind", "linear")
    if kind == "smooth-oracle":
        kind = "oracle"
    if kind not in KINDS:
        violations.append(("objective.kind", f"unknown kind {kind!r}"))
        raise InstanceError(violations)

    n = raw.get("n")
    if n is None:
        for key in ("A", "E"):
            rows = raw.get(key)
            if rows:
                n = len(rows[0])
                break
        else:
            n = len(obj.get("c", []))
    n = int(n)

    A = _matrix(raw.get("A"), n, "A", violations)
    E = _matrix(raw.get("E"), n, "E", violations)
    b = _vector(raw.get("b"), A.rows, "b", violations)
    f_rhs = _vector(raw.get("f"), E.rows, "f", violations)

    integer = raw.get("integer_indices", raw.get("integer", ()))
    integer = tuple(sorted(int(j) for j in integer))
    if len(set(integer)) != len(integer):
        violations.append(("integer_indices", "duplicate indices"))
    if any(j < 0 or j >= n for j in integer):
        violations.append(("integer_indices", f"index out of range [0, {n})"))

    M = raw.get("M")
    if M is not None:
        try:
            M = as_rational(M)
        except Exception as exc:  # noqa: BLE001
            violations.append(("M", str(exc)))
            M = None
        else:
            if M < 0:
                violations.append(("M", "must be nonnegative"))
            elif M.denominator != 1:
                M = Fraction(M.numerator // M.denominator)

    c = _vector(obj.get("c", [0] * n), n, "objective.c", violations)
    Q = None
    oracle = None
    sel = fill = None
    if kind == "quadratic":
        Q = _matrix(obj.get("Q"), n, "objective.Q", violations, allow_missing=False)
        if Q.rows != n:
            violations.append(("objective.Q", f"must be {n}x{n}"))
        elif not Q.is_symmetric():
            violations.append(("objective.Q", "not symmetric"))
        else:
            ok, piv = psd_certificate(Q)
            if not ok:
                violations.append(("objective.Q", f"not positive semidefinite (pivot {piv[-1]})"))
    elif kind == "oracle":
        ospec = obj.get("oracle") or {}
        try:
            dim = int(ospec.get("dim", n))
            oracle = make_oracle(ospec.get("name", ""), dim, ospec.get("params"))
            sel = tuple(range(dim))
            if dim > n:
                violations.append(("objective.oracle.dim", f"exceeds n = {n}"))
            fill = tuple(0.0 for _ in range(dim))
            if oracle.mu > oracle.L:
                violations.append(("objective.oracle", "mu exceeds L"))
        except Exception as exc:  # noqa: BLE001
            violations.append(("objective.oracle", str(exc)))
        if (require_M or obj.get("require_M")) and M is None:
            violations.append(("M", "oracle objectives need an integer bound M on this path"))
    if require_M and kind == "quadratic" and M is None:
        violations.append(("M", "quadratic objectives need an integer bound M on this path"))

    if violations:
        raise InstanceError(violations)
    objective = Objective(kind, c, Q, as_rational(obj.get("const", 0)), oracle, sel, fill)
    return ProblemInstance(
        A=A, b=b, E=E, f_rhs=f_rhs, integer=integer, objective=objective, M=M,
        name=str(raw.get("name", "")), attest_recession=bool(raw.get("attest_recession", False)),
    )


def make_instance(A=None, b=(), E=None, f=(), integer=(), c=None, Q=None, M=None, name="", n=None,
                  oracle=None, oracle_params=None, const=0, attest_recession=False) -> ProblemInstance:
    """Python-side convenience wrapper around :func:`validate`."""
    if n is None:
        n = len(A[0]) if A else (len(E[0]) if E else len(c))
    obj = {"kind": "linear", "c": c if c is not None else [0] * n, "const": const}
    if Q is not None:
        obj["kind"] = "quadratic"
        obj["Q"] = Q
    if oracle is not None:
        obj["kind"] = "oracle"
        obj["oracle"] = {"name": oracle, "params": oracle_params or {}}
    raw = {"name": name, "n": n, "A": A or [], "b": list(b), "E": E or [], "f": list(f),
           "integer_indices": list(integer), "M": M, "objective": obj, "attest_recession": attest_recession}
    return validate(raw)


@dataclass(frozen=True)
class Residual:
    """u = b - A x for a point x; the norm of u is sign-symmetric."""

    u: tuple
    x: tuple


def residual(inst: ProblemInstance, x) -> Residual:
    x = _vec(x)
    if len(x) != inst.n:
        raise ArgumentError(f"point has length {len(x)}, expected {inst.n}")
    Ax = inst.A @ x
    return Residual(tuple(bi - ai for bi, ai in zip(inst.b, Ax)), x)


@dataclass(frozen=True)
class StandardForm:
    """Equality-form instance plus the linear map T with x_original = T x_standard."""

    instance: ProblemInstance
    T: RatMatrix
    n_slack: int
    identity: bool = False

    def recover(self, x_std):
        return self.T @ _vec(x_std)


def _sign_rows(inst: ProblemInstance) -> dict:
    """Rows of E of the form -k x_j <= 0 (k > 0), keyed by variable: they say x_j >= 0."""
    out = {}
    for i, (row, rhs) in enumerate(zip(inst.E, inst.f_rhs)):
        nz = [j for j, v in enumerate(row) if v != 0]
        if rhs == 0 and len(nz) == 1 and row[nz[0]] < 0 and nz[0] not in out:
            out[nz[0]] = i
    return out


def to_standard_form(inst: ProblemInstance) -> StandardForm:
    """Equality form with nonnegative continuous variables.

    Variables already constrained by a row ``-k x_j <= 0`` keep their sign and
    that row is dropped; other continuous variables are split as x+ - x-, and
    the remaining inequality rows get slacks.  Linear kind: integer variables
    without a sign row are split into two nonnegative integers.  Quadratic
    kind: integer variables stay free (bounded by M).  The first ``m`` rows of
    the new equality block are the original ``A`` rows, so a perturbation u of
    the original maps to (u, 0).
    """
    if inst.kind == "oracle":
        raise Unsupported("oracle objectives are handled without a standard form")
    n = inst.n
    split_ints = inst.kind == "linear"
    sign = _sign_rows(inst)
    ints, conts = list(inst.integer), list(inst.continuous)
    keep_rows = [i for i in range(inst.p) if i not in set(sign.values())]
    p = len(keep_rows)

    # column map: new variable -> (original index, sign)
    cols = []
    for j in ints:
        cols.append((j, 1))
        if split_ints and j not in sign:
            cols.append((j, -1))
    n_int_new = len(cols)
    for j in conts:
        cols.append((j, 1))
        if j not in sign:
            cols.append((j, -1))
    n_split = len(cols)
    n_new = n_split + p
    if n_new == n and p == 0 and cols == [(j, 1) for j in range(n)]:
        return StandardForm(inst, RatMatrix.identity(n), 0, identity=True)
    T = RatMatrix([[(s if j == i else 0) for (j, s) in cols] + [0] * p for i in range(n)], cols=n_new)

    AT = inst.A @ T
    ET = inst.E.select_rows(keep_rows) @ T
    A_rows = [list(r) for r in AT] + [
        [*list(r)[:n_split], *[Fraction(int(i == k)) for k in range(p)]] for i, r in enumerate(ET)
    ]
    A_new = RatMatrix(A_rows, cols=n_new)
    b_new = tuple(inst.b) + tuple(inst.f_rhs[i] for i in keep_rows)
    nonneg_new = list(range(n_new)) if split_ints else list(range(n_int_new, n_new))
    E_new = RatMatrix([[-1 if k == j else 0 for k in range(n_new)] for j in nonneg_new], cols=n_new)
    f_new = tuple(Fraction(0) for _ in nonneg_new)

    obj = inst.objective
    c_new = tuple(sum((obj.c[i] * T[i, k] for i in range(n)), Fraction(0)) for k in range(n_new))
    Q_new = None
    if obj.Q is not None:
        Q_new = T.T @ obj.Q @ T
    objective = Objective(obj.kind, c_new, Q_new, obj.const)
    std = ProblemInstance(A=A_new, b=b_new, E=E_new, f_rhs=f_new, integer=tuple(range(n_int_new)),
                          objective=objective, M=inst.M, name=f"{inst.name}-std" if inst.name else "std")
    return StandardForm(std, T, p)


@dataclass(frozen=True)
class RecessionCertificate:
    holds: bool
    direction: tuple | None
    reason: str
    attested: bool = False


def check_recession_condition(inst: ProblemInstance) -> RecessionCertificate:
    """Decide whether rec(f) and rec(F_R) = {d : A d = 0, E d <= 0} meet only at 0."""
    from .lpsolve import solve_lp_general

    obj = inst.objective
    n = inst.n
    if obj.kind == "oracle":
        if obj.mu > 0:
            return RecessionCertificate(True, None, "strongly convex objective: rec(f) = {0}")
        if inst.attest_recession:
            return RecessionCertificate(True, None, "attested by the instance author", attested=True)
        raise Undecidable("rec(f) cannot be derived from an oracle with mu = 0; attest it explicitly")

    eq_rows = [list(r) for r in inst.A]
    if obj.kind == "quadratic":
        piv = psd_certificate(obj.Q)[1]
        if len(piv) == n and all(p > 0 for p in piv):
            return RecessionCertificate(True, None, "positive definite quadratic: rec(f) = {0}")
        eq_rows += [list(r) for r in obj.Q]
    ineq_rows = [list(r) for r in inst.E] + [list(obj.c)]

    # variables (d, t): |d| <= t, minimize sum t, with s * d_i >= 1 for one coordinate
    for i in range(n):
        for s in (1, -1):
            Aeq = [r + [0] * n for r in eq_rows]
            G = [r + [0] * n for r in ineq_rows]
            h = [0] * len(ineq_rows)
            for j in range(n):
                G.append([int(k == j) for k in range(n)] + [-int(k == j) for k in range(n)])
                G.append([-int(k == j) for k in range(n)] + [-int(k == j) for k in range(n)])
                h += [0, 0]
            G.append([-s * int(k == i) for k in range(n)] + [0] * n)
            h.append(-1)
            res = solve_lp_general([0] * n + [1] * n, Aeq, [0] * len(Aeq), G, h)
            if res.status == "optimal":
                d = res.x[:n]
                scale = sum(abs(v) for v in d)
                d = tuple(v / scale for v in d)
                return RecessionCertificate(False, d, "common nonzero recession direction found")
    return RecessionCertificate(True, None, "no nonzero common recession direction (LP certificate)")
