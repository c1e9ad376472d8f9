"""Exact-rational linear constraint store.

Incremental Gaussian elimination: equality rows are kept in reduced
row-echelon form with a designated pivot per row; newly determined
variables are bound straight into the engine bindings.  Inequalities are
checked by Fourier-Motzkin elimination under a small row cap.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (IneqCapExceeded, NonLinearUnsupported, PlTypeError,
                     TypeMix, ZeroDivisor)
from .terms import Struct, Var, normalize_number

EQ_OPS = {"=", "#="}
INEQ_OPS = {"<": "lt", ">": "gt", "=<": "le", ">=": "ge", "#<": "lt",
            "#>": "gt", "#=<": "le", "#>=": "ge"}

DEFAULT_INEQ_CAP = 12


class Underdetermined:
    """Residue answer for variables the echelon cannot pin down."""

    def __init__(self, free_vars):
        self.free_vars = frozenset(free_vars)

    def __repr__(self):
        return f"Underdetermined({set(self.free_vars)})"


class RStore:
    """Echelon equality rows plus inequality rows, with backtrack marks."""

    def __init__(self, bindings, ineq_cap=DEFAULT_INEQ_CAP, is_fd=None):
        self.bindings = bindings
        self.rows = {}        # pivot vid -> (expr: {vid: Fraction}, const)
        self.ineqs = []       # ({vid: Fraction}, const, "le"|"lt")
        self.varobj = {}
        self.ineq_cap = ineq_cap
        self.is_fd = is_fd or (lambda v: False)
        self._marks = []

    def mark(self):
        rows = {p: (dict(e), k) for p, (e, k) in self.rows.items()}
        return (rows, list(self.ineqs), dict(self.varobj))

    def undo_to(self, mark):
        self.rows, self.ineqs, self.varobj = mark

    # --- posting ------------------------------------------------------

    def post(self, goal):
        """Post one linear relation; False means inconsistency."""
        if not (isinstance(goal, Struct) and len(goal.args) == 2):
            raise PlTypeError(f"not a linear constraint: {goal!r}")
        lhs = self._linearize(goal.args[0])
        rhs = self._linearize(goal.args[1])
        expr, const = _sub(lhs, rhs)
        if goal.name in EQ_OPS:
            return self._insert_eq(expr, const)
        rel = INEQ_OPS.get(goal.name)
        if rel is None:
            raise PlTypeError(f"unsupported rational relation {goal.name!r}")
        if rel in ("gt", "ge"):
            expr = {v: -c for v, c in expr.items()}
            const = -const
            rel = "lt" if rel == "gt" else "le"
        return self._insert_ineq(expr, const, rel)

    def _linearize(self, expr):
        """({vid: coeff}, const) for a rational-linear expression."""
        expr = self.bindings.deref(expr)
        if isinstance(expr, bool):
            raise PlTypeError(f"non-numeric in constraint: {expr!r}")
        if isinstance(expr, (int, Fraction)):
            return {}, Fraction(expr)
        if isinstance(expr, Var):
            if self.is_fd(expr):
                raise TypeMix(
                    f"{expr.name} is already finite-domain constrained")
            self.varobj.setdefault(expr.id, expr)
            return {expr.id: Fraction(1)}, Fraction(0)
        if isinstance(expr, Struct):
            if expr.name == "+" and len(expr.args) == 2:
                return _add(self._linearize(expr.args[0]),
                            self._linearize(expr.args[1]))
            if expr.name == "-" and len(expr.args) == 2:
                return _sub(self._linearize(expr.args[0]),
                            self._linearize(expr.args[1]))
            if expr.name == "-" and len(expr.args) == 1:
                e, k = self._linearize(expr.args[0])
                return {v: -c for v, c in e.items()}, -k
            if expr.name == "+" and len(expr.args) == 1:
                return self._linearize(expr.args[0])
            if expr.name == "*" and len(expr.args) == 2:
                left = self._linearize(expr.args[0])
                right = self._linearize(expr.args[1])
                if not left[0]:
                    scale, lin = left[1], right
                elif not right[0]:
                    scale, lin = right[1], left
                else:
                    raise NonLinearUnsupported(
                        "product of two non-ground expressions")
                return {v: scale * c for v, c in lin[0].items()}, scale * lin[1]
            if expr.name in ("/", "rdiv") and len(expr.args) == 2:
                num = self._linearize(expr.args[0])
                den = self._linearize(expr.args[1])
                if den[0]:
                    raise NonLinearUnsupported("division by a variable")
                if den[1] == 0:
                    raise ZeroDivisor("division by zero in constraint")
                inv = 1 / den[1]
                return {v: inv * c for v, c in num[0].items()}, inv * num[1]
        raise PlTypeError(f"unsupported rational expression: {expr!r}")

    # --- echelon maintenance -----------------------------------------

    def _substitute(self, expr, const):
        """Replace every pivot variable in expr by its definition."""
        changed = True
        while changed:
            changed = False
            for vid in list(expr):
                row = self.rows.get(vid)
                if row is not None:
                    c = expr.pop(vid)
                    rexpr, rconst = row
                    for v2, c2 in rexpr.items():
                        expr[v2] = expr.get(v2, Fraction(0)) + c * c2
                        if expr[v2] == 0:
                            del expr[v2]
                    const += c * rconst
                    changed = True
        return expr, const

    def _insert_eq(self, expr, const):
        expr = dict(expr)
        expr, const = self._substitute(expr, const)
        if not expr:
            return const == 0
        pivot = min(expr)  # deterministic pivot choice
        c = expr.pop(pivot)
        pexpr = {v: -cc / c for v, cc in expr.items()}
        pconst = -const / c
        # keep the echelon reduced: eliminate the new pivot everywhere
        for p, (e, k) in list(self.rows.items()):
            if pivot in e:
                coef = e.pop(pivot)
                for v2, c2 in pexpr.items():
                    e[v2] = e.get(v2, Fraction(0)) + coef * c2
                    if e[v2] == 0:
                        del e[v2]
                self.rows[p] = (e, k + coef * pconst)
        self.rows[pivot] = (pexpr, pconst)
        self.ineqs = [
            _subst_into(e, k, pivot, pexpr, pconst) + (rel,)
            for e, k, rel in self.ineqs
        ]
        self._bind_determined()
        return self._check_ground_ineqs()

    def _insert_ineq(self, expr, const, rel):
        if len(self.ineqs) >= self.ineq_cap:
            raise IneqCapExceeded(
                f"more than {self.ineq_cap} inequality rows")
        expr = dict(expr)
        expr, const = self._substitute(expr, const)
        self.ineqs.append((expr, const, rel))
        return self.check_ineq()

    def _bind_determined(self):
        for pivot, (e, k) in self.rows.items():
            if not e:
                var = self.varobj.get(pivot)
                if var is not None and isinstance(self.bindings.deref(var), Var):
                    self.bindings.bind(self.bindings.deref(var),
                                       normalize_number(k))

    def _check_ground_ineqs(self):
        for e, k, rel in self.ineqs:
            if not e:
                if rel == "le" and k > 0:
                    return False
                if rel == "lt" and k >= 0:
                    return False
        return True

    # --- queries ------------------------------------------------------

    def residue(self, variables):
        """Exact value per requested var, or the free variables."""
        values = {}
        free = []
        for var in variables:
            t = self.bindings.deref(var)
            if isinstance(t, (int, Fraction)):
                values[var] = normalize_number(Fraction(t))
                continue
            if isinstance(t, Var):
                row = self.rows.get(t.id)
                if row is not None and not row[0]:
                    values[var] = normalize_number(row[1])
                    continue
            free.append(var)
        if free:
            return Underdetermined(free)
        return values

    def check_ineq(self):
        """Fourier-Motzkin consistency of the inequality rows."""
        rows = [(dict(e), k, rel) for e, k, rel in self.ineqs]
        while True:
            vids = sorted({v for e, _, _ in rows for v in e})
            if not vids:
                break
            v = vids[0]
            pos, neg, rest = [], [], []
            for e, k, rel in rows:
                c = e.get(v, Fraction(0))
                if c > 0:
                    pos.append((e, k, rel))
                elif c < 0:
                    neg.append((e, k, rel))
                else:
                    rest.append((e, k, rel))
            combined = []
            for pe, pk, prel in pos:
                for ne, nk, nrel in neg:
                    pc, nc = pe[v], -ne[v]
                    e = {}
                    for v2, c2 in pe.items():
                        if v2 != v:
                            e[v2] = e.get(v2, Fraction(0)) + nc * c2
                    for v2, c2 in ne.items():
                        if v2 != v:
                            e[v2] = e.get(v2, Fraction(0)) + pc * c2
                    e = {v2: c2 for v2, c2 in e.items() if c2 != 0}
                    k = nc * pk + pc * nk
                    rel = "lt" if "lt" in (prel, nrel) else "le"
                    combined.append((e, k, rel))
            rows = rest + combined
        for e, k, rel in rows:
            if rel == "le" and k > 0:
                return False
            if rel == "lt" and k >= 0:
                return False
        return True


def _add(a, b):
    expr = dict(a[0])
    for v, c in b[0].items():
        expr[v] = expr.get(v, Fraction(0)) + c
        if expr[v] == 0:
            del expr[v]
    return expr, a[1] + b[1]


def _sub(a, b):
    neg = ({v: -c for v, c in b[0].items()}, -b[1])
    return _add(a, neg)


def _subst_into(e, k, pivot, pexpr, pconst):
    if pivot not in e:
        return (e, k)
    e = dict(e)
    coef = e.pop(pivot)
    for v2, c2 in pexpr.items():
        e[v2] = e.get(v2, Fraction(0)) + coef * c2
        if e[v2] == 0:
            del e[v2]
    return (e, k + coef * pconst)
