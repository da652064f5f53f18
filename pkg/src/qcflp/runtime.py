"""Goal solver for translated constraint programs.

The solver performs demand-driven conditional narrowing with chronological
backtracking.  Rules are tried in program order; head patterns force the
evaluation of arguments only as far as unification demands; conditions run
left to right before the right-hand side replaces the call.  Bindings are
shared through the substitution and a call reached through a variable is
evaluated at most once per branch (call-time choice).

Qualification constraints are numeric and never enumerate their variables:
they feed a per-variable interval store that is re-propagated to fixpoint
after every post or aliasing, and an empty interval prunes the branch.
Disequations that cannot be decided yet are parked and re-examined as
bindings arrive; leftovers surface as residual constraints and flag the
answer as conditional.

Nondeterminism is implemented with generators over copy-on-branch stores,
so exhausted branches leave no traces.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .constraints import Interval, _constraint_step, eval_primitive
from .domains import QualDomain, U
from .syntax import Program, print_constraint
from .terms import (App, AtomicConstraint, Basic, Bottom, BOTTOM, Expr,
                    FALSE, TRUE, Var, apply_subst, format_real, vars_of)

ARITH = ("+", "-", "*")
RELS = ("<=", "<", ">=", ">")

INF = float("inf")

# interval tuples (lo, hi, lo_open, hi_open); a lightweight mirror of
# constraints.Interval used in the solver's hot loop
IV_FULL = (-INF, INF, False, False)


def _iv_empty(t) -> bool:
    return t[0] > t[1] or (t[0] == t[1] and (t[2] or t[3]))


def _div_down(x: float, k: float) -> float:
    """x / k, rounded one step toward minus infinity.

    Derived lower bounds must not exceed their exact real value, or a
    threshold equal to a representable product of factors would cut the
    very branch that produced it.
    """
    if k == 1.0:
        return x
    out = x / k
    if out in (INF, -INF):
        return out
    return math.nextafter(out, -INF)


def _iv_meet(a, b):
    if a[0] > b[0]:
        lo, lo_o = a[0], a[2]
    elif b[0] > a[0]:
        lo, lo_o = b[0], b[2]
    else:
        lo, lo_o = a[0], a[2] or b[2]
    if a[1] < b[1]:
        hi, hi_o = a[1], a[3]
    elif b[1] < a[1]:
        hi, hi_o = b[1], b[3]
    else:
        hi, hi_o = a[1], a[3] or b[3]
    return (lo, hi, lo_o, hi_o)


@dataclass
class Limits:
    depth: int = 64
    answers: Optional[int] = None


@dataclass
class EvalRec:
    """One recorded reduction of a call, for later proof replay."""
    call: Expr
    kind: str                      # "fun" | "prim"
    result: Expr
    rule_index: Optional[int] = None
    patterns: Optional[tuple] = None
    rhs: Optional[Expr] = None
    conditions: Optional[tuple] = None
    rename: Optional[dict] = None  # original rule variable -> renamed Var


@dataclass
class Store:
    subst: dict = field(default_factory=dict)
    ivals: dict = field(default_factory=dict)       # root var -> interval tuple
    qcons: list = field(default_factory=list)       # compiled posted constraints
    qindex: dict = field(default_factory=dict)      # var name -> constraint ids
    suspended: list = field(default_factory=list)   # parked disequations
    evals: dict = field(default_factory=dict)       # id(call expr) -> EvalRec
    declared: set = field(default_factory=set)      # qVal-introduced variables
    malformed: bool = False                         # bound on an undeclared one

    def copy(self) -> "Store":
        return Store(dict(self.subst), dict(self.ivals), list(self.qcons),
                     {k: list(v) for k, v in self.qindex.items()},
                     list(self.suspended), dict(self.evals),
                     set(self.declared), self.malformed)


@dataclass
class Answer:
    subst: dict                    # goal data variable -> resolved term
    qual: dict                     # qualification component -> Interval
    residual: list                 # unresolved constraints (pretty-printable)
    flags: list
    store: Store = field(repr=False, compare=False, default=None)


class Solver:
    def __init__(self, program: Program, dom: QualDomain = U,
                 limits: Limits = None, trace=None):
        self.program = program
        self.sig = program.signature
        self.dom = dom
        self.limits = limits or Limits()
        self.trace = trace
        self._rules = {}
        for i, r in enumerate(program.rules):
            self._rules.setdefault(r.name, []).append((i, r))
        self._rule_vars = {}
        self._fresh = itertools.count()
        self.cut = False

    # ------------------------------------------------------------------
    # plumbing
    # ------------------------------------------------------------------

    def _log(self, msg: str) -> None:
        if self.trace:
            self.trace(msg)

    def walk(self, store: Store, e: Expr) -> Expr:
        while isinstance(e, Var) and e.name in store.subst:
            e = store.subst[e.name]
        return e

    def resolve(self, store: Store, e: Expr) -> Expr:
        """Deep substitution walk; keeps unevaluated calls in place."""
        e = self.walk(store, e)
        if isinstance(e, App) and e.args:
            return App(e.symbol, tuple(self.resolve(store, a) for a in e.args))
        return e

    def _fresh_var(self) -> Var:
        return Var(f"~{next(self._fresh)}")

    def _rename_rule(self, rule):
        key = id(rule)
        if key not in self._rule_vars:
            self._rule_vars[key] = sorted(vars_of(rule.patterns)
                                          | vars_of(rule.rhs)
                                          | vars_of(rule.conditions))
        n = next(self._fresh)
        ren = {v: Var(f"~{n}~{v}") for v in self._rule_vars[key]}
        pats = tuple(apply_subst(p, ren) for p in rule.patterns)
        rhs = apply_subst(rule.rhs, ren)
        conds = tuple(apply_subst(c, ren) for c in rule.conditions)
        return pats, rhs, conds, ren

    # ------------------------------------------------------------------
    # interval store
    #
    # Posted constraints are compiled to monomial bounds k*x REL m*y (with
    # either side possibly constant) plus the qualification-range shape;
    # anything else falls back to the generic engine.  Propagation runs a
    # worklist seeded by the posted constraint or the rebound variable.
    # ------------------------------------------------------------------

    def _compile_post(self, c: AtomicConstraint):
        want = c.result
        if c.symbol == "qVal" and want == TRUE and isinstance(c.args[0], Var):
            return ("qval", c.args[0].name)
        sym = c.symbol
        if sym in RELS and want == FALSE:
            sym = {"<=": ">", "<": ">=", ">=": "<", ">": "<="}[sym]
            want = TRUE
        if sym in RELS and want == TRUE:
            lhs, rhs = c.args
            if sym in (">=", ">"):
                lhs, rhs = rhs, lhs
                sym = "<=" if sym == ">=" else "<"
            L = self._monomial(lhs)
            R = self._monomial(rhs)
            if L is not None and R is not None:
                return ("mono", sym == "<", L, R)
        return ("generic", c)

    @staticmethod
    def _monomial(e: Expr):
        """(coefficient, var name) with name None for constants, or None."""
        if isinstance(e, Basic):
            return (e.value, None)
        if isinstance(e, Var):
            return (1.0, e.name)
        if isinstance(e, App) and e.symbol == "*" and len(e.args) == 2:
            a, b = e.args
            if isinstance(a, Basic) and isinstance(b, Var) and a.value > 0:
                return (a.value, b.name)
            if isinstance(b, Basic) and isinstance(a, Var) and b.value > 0:
                return (b.value, a.name)
        return None

    def _resolve_side(self, store: Store, side):
        """Resolve a monomial side to ('c', value) or ('v', coef, root)."""
        k, name = side
        if name is None:
            return ("c", k)
        v = self.walk(store, Var(name))
        if isinstance(v, Basic):
            return ("c", k * v.value)
        if isinstance(v, Var):
            return ("v", k, v.name)
        return None

    def _narrow(self, store: Store, name: str, lo=None, lo_open=False,
                hi=None, hi_open=False):
        """Tighten one bound exactly; returns 'fail', 'changed' or 'same'.

        Exact narrowing makes the fixpoint satisfy every posted bound
        under plain float comparison; runaway ulp chains are cut by the
        propagation step guard instead of a tolerance here.
        """
        clo, chi, clo_o, chi_o = store.ivals.get(name, IV_FULL)
        changed = False
        if lo is not None:
            if lo > clo:
                clo, clo_o = lo, lo_open
                changed = True
            elif lo == clo and lo_open and not clo_o:
                clo_o = True
                changed = True
        if hi is not None:
            if hi < chi:
                chi, chi_o = hi, hi_open
                changed = True
            elif hi == chi and hi_open and not chi_o:
                chi_o = True
                changed = True
        if not changed:
            return "same"
        t = (clo, chi, clo_o, chi_o)
        if _iv_empty(t):
            return "fail"
        store.ivals[name] = t
        return "changed"

    def _step_constraint(self, store: Store, idx: int):
        """One propagation step; returns None on failure else changed roots."""
        kind = store.qcons[idx]
        changed = set()
        if kind[0] == "qval":
            v = self.walk(store, Var(kind[1]))
            if isinstance(v, Basic):
                return None if not (0.0 < v.value <= 1.0) else changed
            if not isinstance(v, Var):
                return None
            r = self._narrow(store, v.name, lo=0.0, lo_open=True)
            if r == "fail":
                return None
            r2 = self._narrow(store, v.name, hi=1.0)
            if r2 == "fail":
                return None
            if "changed" in (r, r2):
                changed.add(v.name)
            return changed
        if kind[0] == "mono":
            _, strict, L, R = kind
            ls = self._resolve_side(store, L)
            rs = self._resolve_side(store, R)
            if ls is None or rs is None:
                return None
            if ls[0] == "c" and rs[0] == "c":
                ok = ls[1] < rs[1] if strict else ls[1] <= rs[1]
                return changed if ok else None
            if ls[0] == "c":
                _, kr, ry = rs
                r = self._narrow(store, ry, lo=_div_down(ls[1], kr),
                                 lo_open=strict)
                if r == "fail":
                    return None
                if r == "changed":
                    changed.add(ry)
                return changed
            if rs[0] == "c":
                _, kl, lx = ls
                r = self._narrow(store, lx, hi=rs[1] / kl, hi_open=strict)
                if r == "fail":
                    return None
                if r == "changed":
                    changed.add(lx)
                return changed
            _, kl, lx = ls
            _, kr, ry = rs
            xlo, xhi, xlo_o, xhi_o = store.ivals.get(lx, IV_FULL)
            ylo, yhi, ylo_o, yhi_o = store.ivals.get(ry, IV_FULL)
            if yhi != INF:
                r = self._narrow(store, lx, hi=kr * yhi / kl,
                                 hi_open=yhi_o or strict)
                if r == "fail":
                    return None
                if r == "changed":
                    changed.add(lx)
            if xlo != -INF:
                r = self._narrow(store, ry, lo=_div_down(kl * xlo, kr),
                                 lo_open=xlo_o or strict)
                if r == "fail":
                    return None
                if r == "changed":
                    changed.add(ry)
            return changed
        # generic fallback through the full interval engine
        c = kind[1]
        resolved = AtomicConstraint(
            c.symbol, tuple(self._resolve_numeric(store, a) for a in c.args),
            self.walk(store, c.result))
        roots = vars_of(resolved)
        box = {n: Interval(*store.ivals[n]) for n in roots if n in store.ivals}
        if _constraint_step(resolved, box) is None:
            return None
        for n, iv in box.items():
            if iv.is_empty():
                return None
            t = (iv.lo, iv.hi, iv.lo_open, iv.hi_open)
            if store.ivals.get(n, IV_FULL) != t:
                store.ivals[n] = t
                changed.add(n)
        return changed

    def _resolve_numeric(self, store: Store, e: Expr) -> Expr:
        e = self.walk(store, e)
        if isinstance(e, App) and e.args:
            return App(e.symbol, tuple(self._resolve_numeric(store, a) for a in e.args))
        return e

    def _propagate_from(self, store: Store, seeds) -> bool:
        queue = list(seeds)
        guard = 0
        while queue:
            guard += 1
            if guard > 20000:
                break
            idx = queue.pop()
            changed = self._step_constraint(store, idx)
            if changed is None:
                return False
            for name in changed:
                for j in store.qindex.get(name, ()):
                    if j != idx:
                        queue.append(j)
        return True

    def _post(self, store: Store, c: AtomicConstraint, orig: AtomicConstraint) -> bool:
        compiled = self._compile_post(c)
        # well-formed translations declare every qualification variable
        # before bounding it; a bound whose source names were never
        # declared marks the whole branch as malformed
        if orig.symbol == "qVal":
            for name in vars_of(orig):
                store.declared.add(name)
        else:
            for name in vars_of(orig):
                if name not in store.declared:
                    store.malformed = True
        store.qcons.append(compiled)
        idx = len(store.qcons) - 1
        for name in vars_of(c):
            store.qindex.setdefault(name, []).append(idx)
        return self._propagate_from(store, [idx])

    def post_qual(self, store: Store, c: AtomicConstraint):
        """Post one qualification constraint; a fresh store, or None on failure."""
        out = store.copy()
        if not self._post(out, c, c):
            return None
        return out

    def _bind(self, store: Store, name: str, value: Expr) -> bool:
        store.subst[name] = value
        seeds = list(store.qindex.get(name, ()))
        if name in store.ivals:
            iv = store.ivals.pop(name)
            v = self.walk(store, value)
            if isinstance(v, Var):
                merged = _iv_meet(iv, store.ivals.get(v.name, IV_FULL))
                if _iv_empty(merged):
                    return False
                store.ivals[v.name] = merged
                # constraints watching the old name now watch the new root
                root_ids = store.qindex.get(v.name, [])
                seeds = seeds + list(root_ids)
                if name in store.qindex:
                    store.qindex.setdefault(v.name, []).extend(store.qindex[name])
            elif isinstance(v, Basic):
                lo, hi, lo_o, hi_o = iv
                if not (lo < v.value < hi or (v.value == lo and not lo_o)
                        or (v.value == hi and not hi_o)):
                    return False
            else:
                return False  # an interval-carrying variable is numeric
        if seeds and not self._propagate_from(store, seeds):
            return False
        return True

    # ------------------------------------------------------------------
    # head normal forms
    # ------------------------------------------------------------------

    def hnf(self, e: Expr, store: Store, depth: int) -> Iterator[tuple]:
        e = self.walk(store, e)
        if isinstance(e, (Var, Basic)):
            yield e, store
            return
        if isinstance(e, Bottom):
            return
        kind = self.sig.kind(e.symbol)
        if kind == "dc" or kind is None:
            yield e, store
            return
        # call-time choice: a call already reduced in this branch keeps
        # its value; alternatives only arise by backtracking above it
        rec = store.evals.get(id(e))
        if rec is not None and rec.call is e:
            yield rec.result, store
            return
        if kind == "pf":
            for args, st in self._reduce_args(list(e.args), store, depth):
                if not all(isinstance(a, (Basic, App)) for a in args):
                    self.cut = True
                    continue
                try:
                    res = eval_primitive(e.symbol, list(args))
                except Exception:
                    continue
                if res == BOTTOM:
                    if any(vars_of(a) for a in args):
                        self.cut = True  # undecided, not undefined
                    continue
                st2 = st.copy()
                st2.evals[id(e)] = EvalRec(e, "prim", res)
                yield res, st2
            return
        # defined function: try the rules in program order
        if depth <= 0:
            self.cut = True
            return
        for index, rule in self._rules.get(e.symbol, []):
            pats, rhs, conds, ren = self._rename_rule(rule)
            st = store.copy()
            self._log(f"try rule {index}: {rule.name}")
            for st1 in self._unify_seq(list(pats), list(e.args), st, depth):
                for st2 in self._solve_all(list(conds), st1, depth - 1):
                    for res, st3 in self.hnf(rhs, st2, depth - 1):
                        st4 = st3.copy()
                        st4.evals[id(e)] = EvalRec(e, "fun", res, index, pats,
                                                   rhs, conds, ren)
                        yield res, st4

    def _reduce_args(self, args: list, store: Store, depth: int) -> Iterator[tuple]:
        if not args:
            yield (), store
            return
        for v, st in self._reduce_value(args[0], store, depth):
            for rest, st2 in self._reduce_args(args[1:], st, depth):
                yield (v,) + rest, st2

    def _reduce_value(self, e: Expr, store: Store, depth: int) -> Iterator[tuple]:
        """Reduce to a value as deeply as possible, leaving free variables.

        Arithmetic nodes are reduced structurally rather than demanded, so
        expressions over unbound qualification variables survive and can be
        sent to the interval store; ground arithmetic folds to a literal.
        """
        e = self.walk(store, e)
        if isinstance(e, App) and e.symbol in ARITH and len(e.args) == 2:
            for parts, st in self._reduce_args(list(e.args), store, depth):
                if all(isinstance(p, Basic) for p in parts):
                    yield eval_primitive(e.symbol, list(parts)), st
                else:
                    yield App(e.symbol, parts), st
            return
        for h, st in self.hnf(e, store, depth):
            if isinstance(h, App) and h.args and self.sig.kind(h.symbol) != "pf":
                for parts, st2 in self._reduce_args(list(h.args), st, depth):
                    yield App(h.symbol, parts), st2
            else:
                yield h, st

    # ------------------------------------------------------------------
    # unification
    # ------------------------------------------------------------------

    def _unify_seq(self, pats: list, args: list, store: Store, depth: int) -> Iterator[Store]:
        if not pats:
            yield store
            return
        for st in self._unify_pattern(pats[0], args[0], store, depth):
            yield from self._unify_seq(pats[1:], args[1:], st, depth)

    def _unify_pattern(self, pat: Expr, arg: Expr, store: Store, depth: int) -> Iterator[Store]:
        pat = self.walk(store, pat)
        if isinstance(pat, Var):
            st = store.copy()
            if self._bind(st, pat.name, arg):
                yield st
            return
        for h, st in self.hnf(arg, store, depth):
            if isinstance(h, Var):
                st2 = st.copy()
                if self._bind(st2, h.name, pat):
                    yield st2
            elif isinstance(pat, Basic):
                if isinstance(h, Basic) and h.value == pat.value:
                    yield st
            elif isinstance(pat, App) and isinstance(h, App) \
                    and pat.symbol == h.symbol and len(pat.args) == len(h.args):
                yield from self._unify_seq(list(pat.args), list(h.args), st, depth)

    def _occurs(self, store: Store, name: str, e: Expr) -> bool:
        e = self.walk(store, e)
        if isinstance(e, Var):
            return e.name == name
        if isinstance(e, App):
            return any(self._occurs(store, name, a) for a in e.args)
        return False

    def _unify_strict(self, a: Expr, b: Expr, store: Store, depth: int) -> Iterator[Store]:
        """Strict equality: both sides evaluate to the same total value."""
        for ha, st1 in self.hnf(a, store, depth):
            for hb, st2 in self.hnf(b, st1, depth):
                yield from self._unify_heads(ha, hb, st2, depth)

    def _unify_heads(self, ha: Expr, hb: Expr, store: Store, depth: int) -> Iterator[Store]:
        if isinstance(ha, Var) and isinstance(hb, Var):
            st = store.copy()
            if ha.name == hb.name or self._bind(st, ha.name, hb):
                yield st
            return
        if isinstance(ha, Var) or isinstance(hb, Var):
            v, t = (ha, hb) if isinstance(ha, Var) else (hb, ha)
            if isinstance(t, Basic):
                st = store.copy()
                if self._bind(st, v.name, t):
                    yield st
                return
            # t is a constructor application: bind to a skeleton and force parts
            if self._occurs(store, v.name, t):
                return
            fresh = tuple(self._fresh_var() for _ in t.args)
            st = store.copy()
            if not self._bind(st, v.name, App(t.symbol, fresh)):
                return
            yield from self._strict_seq(list(fresh), list(t.args), st, depth)
            return
        if isinstance(ha, Basic) and isinstance(hb, Basic):
            if ha.value == hb.value:
                yield store
            return
        if isinstance(ha, App) and isinstance(hb, App) \
                and ha.symbol == hb.symbol and len(ha.args) == len(hb.args):
            yield from self._strict_seq(list(ha.args), list(hb.args), store, depth)

    def _strict_seq(self, xs: list, ys: list, store: Store, depth: int) -> Iterator[Store]:
        if not xs:
            yield store
            return
        for st in self._unify_strict(xs[0], ys[0], store, depth):
            yield from self._strict_seq(xs[1:], ys[1:], st, depth)

    # ------------------------------------------------------------------
    # disequality
    # ------------------------------------------------------------------

    def _static_compare(self, store: Store, a: Expr, b: Expr) -> str:
        """Three-valued structural comparison without any evaluation."""
        a = self.walk(store, a)
        b = self.walk(store, b)
        if isinstance(a, Var) or isinstance(b, Var):
            return "unknown"
        if isinstance(a, Bottom) or isinstance(b, Bottom):
            return "unknown"
        if isinstance(a, Basic) or isinstance(b, Basic):
            if isinstance(a, Basic) and isinstance(b, Basic):
                return "same" if a.value == b.value else "diff"
            if isinstance(a, App) and self.sig.kind(a.symbol) == "dc":
                return "diff"
            if isinstance(b, App) and self.sig.kind(b.symbol) == "dc":
                return "diff"
            return "unknown"
        if self.sig.kind(a.symbol) != "dc" or self.sig.kind(b.symbol) != "dc":
            return "unknown"
        if a.symbol != b.symbol or len(a.args) != len(b.args):
            return "diff"
        verdict = "same"
        for x, y in zip(a.args, b.args):
            sub = self._static_compare(store, x, y)
            if sub == "diff":
                return "diff"
            if sub == "unknown":
                verdict = "unknown"
        return verdict

    def _disequal(self, a: Expr, b: Expr, store: Store, depth: int) -> Iterator[Store]:
        for ha, st1 in self.hnf(a, store, depth):
            for hb, st2 in self.hnf(b, st1, depth):
                verdict = self._static_compare(st2, ha, hb)
                if verdict == "diff":
                    yield st2
                elif verdict == "unknown":
                    st3 = st2.copy()
                    st3.suspended.append(AtomicConstraint("==", (ha, hb), FALSE))
                    yield st3

    def _check_suspended(self, store: Store) -> Optional[bool]:
        """Re-examine parked disequations; False on refutation."""
        keep = []
        for c in store.suspended:
            verdict = self._static_compare(store, c.args[0], c.args[1])
            if verdict == "same":
                return False
            if verdict == "unknown":
                keep.append(c)
        store.suspended = keep
        return True

    # ------------------------------------------------------------------
    # constraint solving
    # ------------------------------------------------------------------

    def _numeric_shape(self, store: Store, e: Expr) -> bool:
        e = self.walk(store, e)
        if isinstance(e, (Basic, Var)):
            return True
        if isinstance(e, App) and e.symbol in ARITH and len(e.args) == 2:
            return all(self._numeric_shape(store, a) for a in e.args)
        return False

    def _solve_all(self, cs: list, store: Store, depth: int) -> Iterator[Store]:
        if not cs:
            yield store
            return
        for st in self.solve_constraint(cs[0], store, depth):
            st2 = st.copy()
            ok = self._check_suspended(st2)
            if ok is False:
                continue
            yield from self._solve_all(cs[1:], st2, depth)

    def solve_constraint(self, c: AtomicConstraint, store: Store, depth: int) -> Iterator[Store]:
        want = self.walk(store, c.result)
        if c.symbol == "==":
            if want == TRUE:
                yield from self._unify_strict(c.args[0], c.args[1], store, depth)
                return
            if want == FALSE:
                yield from self._disequal(c.args[0], c.args[1], store, depth)
                return
            if isinstance(want, Var):
                for st in self._unify_strict(c.args[0], c.args[1], store, depth):
                    st2 = st.copy()
                    if self._bind(st2, want.name, TRUE):
                        yield st2
                for st in self._disequal(c.args[0], c.args[1], store, depth):
                    st2 = st.copy()
                    if self._bind(st2, want.name, FALSE):
                        yield st2
                return
            return
        # primitive constraints: arithmetic relations and qualification bounds
        for args, st in self._reduce_args(list(c.args), store, depth):
            ground = all(isinstance(a, (Basic, App)) and not vars_of(a) for a in args)
            if ground:
                try:
                    res = eval_primitive(c.symbol, list(args))
                except Exception:
                    continue
                if res == BOTTOM:
                    continue
                w = self.walk(st, want)
                if isinstance(w, Var):
                    st2 = st.copy()
                    if self._bind(st2, w.name, res):
                        yield st2
                elif res == w:
                    yield st
                continue
            if want in (TRUE, FALSE) and c.symbol in (*RELS, "qVal", "qBound", "==") \
                    and all(self._numeric_shape(st, a) for a in args):
                st2 = st.copy()
                if self._post(st2, AtomicConstraint(c.symbol, tuple(args), want), c):
                    yield st2
                continue
            # outside the decidable fragment: park it
            st2 = st.copy()
            st2.suspended.append(AtomicConstraint(c.symbol, tuple(args), want))
            yield st2

    # ------------------------------------------------------------------
    # answers
    # ------------------------------------------------------------------

    def solve(self, constraints: list, wvars: list, datavars: list) -> Iterator[Answer]:
        """Enumerate qualified answers for a translated goal conjunction."""
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))
        self.cut = False
        emitted = 0
        for st in self._solve_all(list(constraints), Store(), self.limits.depth):
            if self._check_suspended(st) is False:
                continue
            yield self._answer(st, wvars, datavars)
            emitted += 1
            if self.limits.answers is not None and emitted >= self.limits.answers:
                return

    def _leaves(self, wname: str) -> list:
        return [wname + suf for suf in self.dom.leaf_suffixes()]

    def _answer(self, store: Store, wvars: list, datavars: list) -> Answer:
        subst = {}
        for v in datavars:
            val = self.resolve_result(store, Var(v))
            if not (isinstance(val, Var) and val.name == v):
                subst[v] = val
        qual = {}
        for w in wvars:
            for leaf in self._leaves(w):
                root = self.walk(store, Var(leaf))
                if isinstance(root, Var):
                    qual[leaf] = Interval(*store.ivals.get(root.name, IV_FULL))
                elif isinstance(root, Basic):
                    qual[leaf] = Interval(root.value, root.value)
                else:
                    qual[leaf] = Interval()
        flags = []
        if self.cut:
            flags.append("incomplete")
        residual = [self._resolve_constraint(store, c) for c in store.suspended]
        if residual:
            flags.append("conditional")
        if store.malformed:
            flags.append("malformed-qual")
        return Answer(subst, qual, residual, flags, store)

    def resolve_result(self, store: Store, e: Expr) -> Expr:
        """Deep resolution through bindings and recorded evaluations."""
        e = self.walk(store, e)
        if isinstance(e, App):
            rec = store.evals.get(id(e))
            if rec is not None and rec.call is e:
                return self.resolve_result(store, rec.result)
            if e.args:
                return App(e.symbol, tuple(self.resolve_result(store, a) for a in e.args))
        return e

    def _resolve_constraint(self, store: Store, c: AtomicConstraint) -> AtomicConstraint:
        return AtomicConstraint(c.symbol,
                                tuple(self.resolve_result(store, a) for a in c.args),
                                self.resolve_result(store, c.result))


# ======================================================================
# Proof replay
# ======================================================================

class ReplayError(ValueError):
    pass


class _Replay:
    """Rebuilds qualification-free proof trees from a solved store.

    Qualification variables are instantiated at the upper bound of their
    interval (any point of the box is a solution, the bound is the best
    one); data variables resolve through the substitution; calls resolve
    through the recorded reductions, and unevaluated calls denote the
    undefined value on result positions.
    """

    def __init__(self, solver: Solver, store: Store):
        self.solver = solver
        self.store = store
        self.sig = solver.sig

    def _walk(self, e: Expr) -> Expr:
        return self.solver.walk(self.store, e)

    def _rho(self, name: str):
        t = self.store.ivals.get(name)
        return None if t is None else Basic(t[1])

    def value(self, e: Expr) -> Expr:
        """Result-side resolution: a term, with unevaluated calls as bottom."""
        e = self._walk(e)
        if isinstance(e, Var):
            return self._rho(e.name) or e
        if isinstance(e, App):
            rec = self.store.evals.get(id(e))
            if rec is not None and rec.call is e:
                return self.value(rec.result)
            kind = self.sig.kind(e.symbol)
            if kind == "dc" or kind is None:
                return App(e.symbol, tuple(self.value(a) for a in e.args))
            if kind == "pf":
                parts = [self.value(a) for a in e.args]
                try:
                    return eval_primitive(e.symbol, parts)
                except Exception:
                    return BOTTOM
            return BOTTOM
        return e

    def display(self, e: Expr) -> Expr:
        """Left-side resolution: keeps call structure in place."""
        e = self._walk(e)
        if isinstance(e, Var):
            return self._rho(e.name) or e
        if isinstance(e, App) and e.args:
            return App(e.symbol, tuple(self.display(a) for a in e.args))
        return e

    def production_tree(self, e: Expr, target: Expr):
        from .semantics import ProofTree, production
        ew = self._walk(e)
        shown = self.display(ew)
        if isinstance(target, Bottom):
            return ProofTree("triv", production(shown, BOTTOM))
        if isinstance(shown, (Var, Basic)):
            if shown != target:
                raise ReplayError(f"cannot replay {shown!r} to {target!r}")
            return ProofTree("refl", production(shown, target))
        rec = self.store.evals.get(id(ew))
        rec = rec if rec is not None and rec.call is ew else None
        kind = self.sig.kind(ew.symbol)
        if rec is not None and rec.kind == "fun":
            theta = tuple(sorted(
                (orig, self.value(renamed))
                for orig, renamed in rec.rename.items()))
            kids = []
            for arg, pat in zip(ew.args, rec.patterns):
                kids.append(self.production_tree(arg, self.value(pat)))
            kids.append(self.production_tree(rec.rhs, target))
            for c in rec.conditions:
                kids.append(self.atom_tree(c))
            return ProofTree("fun", production(shown, target), tuple(kids),
                             rule_index=rec.rule_index, theta=theta)
        if kind == "pf":
            kids = tuple(self.production_tree(a, self.value(a)) for a in ew.args)
            return ProofTree("prim", production(shown, target), kids)
        if kind == "dc" or kind is None:
            if not (isinstance(target, App) and target.symbol == ew.symbol
                    and len(target.args) == len(ew.args)):
                raise ReplayError(f"constructor mismatch replaying {shown!r}")
            kids = tuple(self.production_tree(a, t)
                         for a, t in zip(ew.args, target.args))
            return ProofTree("cons", production(shown, target), kids)
        raise ReplayError(f"no recorded reduction for {shown!r}")

    def atom_tree(self, c: AtomicConstraint):
        from .semantics import ProofTree, atom_statement
        kids = tuple(self.production_tree(a, self.value(a)) for a in c.args)
        shown = AtomicConstraint(c.symbol,
                                 tuple(self.display(a) for a in c.args),
                                 self.value(c.result))
        return ProofTree("atom", atom_statement(shown), kids)


def replay_trees(solver: Solver, answer: Answer, constraints: list) -> list:
    """Qualification-free proof trees for every goal constraint of an answer.

    Only meaningful for answers without residual constraints; the trees
    are checkable against the translated program.
    """
    if answer.residual:
        raise ReplayError("conditional answers cannot be replayed")
    r = _Replay(solver, answer.store)
    return [r.atom_tree(c) for c in constraints]


# ======================================================================
# Rendering
# ======================================================================

def _fmt_bound(x: float) -> str:
    return format_real(x) if x not in (float("inf"), float("-inf")) else \
        ("inf" if x > 0 else "-inf")


def format_interval(iv: Interval) -> str:
    if iv.lo == iv.hi and not iv.lo_open and not iv.hi_open:
        return format_real(iv.lo)
    left = "(" if iv.lo_open or iv.lo == float("-inf") else "["
    right = ")" if iv.hi_open or iv.hi == float("inf") else "]"
    return f"{left}{_fmt_bound(iv.lo)}, {_fmt_bound(iv.hi)}{right}"


def render_answer(ans: Answer) -> str:
    from .syntax import print_expr
    parts = []
    if ans.subst:
        inner = ", ".join(f"{v} -> {print_expr(t)}" for v, t in sorted(ans.subst.items()))
        parts.append("{ " + inner + " }")
    else:
        parts.append("{ }")
    quals = ", ".join(f"{w} in {format_interval(iv)}" for w, iv in sorted(ans.qual.items()))
    parts.append("{ " + quals + " }" if quals else "{ }")
    if ans.residual:
        parts.append("<< " + ", ".join(print_constraint(c) for c in ans.residual) + " >>")
    if ans.flags:
        parts.append("[" + ", ".join(ans.flags) + "]")
    return " ".join(parts)


def answer_record(ans: Answer) -> dict:
    from .syntax import print_expr
    return {
        "subst": {v: print_expr(t) for v, t in sorted(ans.subst.items())},
        "qual": {w: {"lo": iv.lo, "hi": iv.hi,
                     "lo_open": iv.lo_open, "hi_open": iv.hi_open}
                 for w, iv in sorted(ans.qual.items())},
        "residual": [print_constraint(c) for c in ans.residual],
        "flags": list(ans.flags),
    }
