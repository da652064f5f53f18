"""Primitive constraint solving over the reals.

The engine is deliberately incomplete but sound: it decides conjunctions
of arithmetic comparison constraints by interval propagation over a box
of per-variable intervals (with open/closed bounds), plus ground
structural (dis)equality on constructor data.  Everything outside that
fragment answers "unknown".

Primitive evaluation follows the usual strictness discipline: a result
is undefined (bottom) whenever a demanded argument is undefined, and any
defined result is a literal or a nullary constructor.  Strict equality
returns false as soon as a constructor clash is detectable, true only on
identical total values.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Optional

from .terms import (App, AtomicConstraint, Basic, Bottom, Expr, FALSE, TRUE,
                    Var, BOTTOM, BUILTIN_PF, format_real, is_ground, is_total,
                    vars_of)

INF = math.inf

ARITH = {"+", "-", "*"}
RELS = {"<=", "<", ">=", ">"}


class PrimitiveError(ValueError):
    """A non-primitive symbol was handed to the primitive evaluator."""


# ======================================================================
# Ground evaluation of primitives
# ======================================================================

def eval_primitive(symbol: str, args: list) -> Expr:
    """Interpretation of a primitive symbol on ground arguments.

    Arguments may contain bottoms; the result is then bottom unless the
    constraint is decidable regardless (a detectable clash under strict
    equality).  Ill-sorted applications also denote bottom.
    """
    if symbol not in BUILTIN_PF:
        raise PrimitiveError(f"not a primitive symbol: {symbol!r}")
    if symbol == "==":
        return _strict_equal(args[0], args[1])
    if symbol == "qVal":
        a = args[0]
        if isinstance(a, Basic):
            return TRUE if 0.0 < a.value <= 1.0 else FALSE
        return BOTTOM
    if symbol == "qBound":
        if all(isinstance(a, Basic) for a in args):
            x, y, z = (a.value for a in args)
            return TRUE if x <= y * z else FALSE
        return BOTTOM
    # arithmetic and comparisons need numeric arguments
    if not all(isinstance(a, Basic) for a in args):
        return BOTTOM
    x, y = args[0].value, args[1].value
    if symbol == "+":
        return Basic(x + y)
    if symbol == "-":
        return Basic(x - y)
    if symbol == "*":
        return Basic(x * y)
    if symbol == "<=":
        return TRUE if x <= y else FALSE
    if symbol == "<":
        return TRUE if x < y else FALSE
    if symbol == ">=":
        return TRUE if x >= y else FALSE
    if symbol == ">":
        return TRUE if x > y else FALSE
    raise PrimitiveError(symbol)


def _strict_equal(a: Expr, b: Expr) -> Expr:
    """Strict equality: true on identical totals, false on a clash, else bottom."""
    if _clash(a, b):
        return FALSE
    if is_total(a) and is_total(b) and a == b:
        return TRUE
    return BOTTOM


def _clash(a: Expr, b: Expr) -> bool:
    if isinstance(a, (Bottom, Var)) or isinstance(b, (Bottom, Var)):
        return False
    if isinstance(a, Basic) or isinstance(b, Basic):
        if isinstance(a, Basic) and isinstance(b, Basic):
            return a.value != b.value
        return True
    if isinstance(a, App) and isinstance(b, App):
        if a.symbol != b.symbol or len(a.args) != len(b.args):
            return True
        return any(_clash(x, y) for x, y in zip(a.args, b.args))
    return False


# ======================================================================
# Intervals with open/closed bounds
# ======================================================================

@dataclass(frozen=True)
class Interval:
    lo: float = -INF
    hi: float = INF
    lo_open: bool = False
    hi_open: bool = False

    def is_empty(self) -> bool:
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))

    def contains(self, x: float) -> bool:
        if x < self.lo or (x == self.lo and self.lo_open):
            return False
        if x > self.hi or (x == self.hi and self.hi_open):
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        if other.lo > self.lo or (other.lo == self.lo and other.lo_open):
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open
        if other.hi < self.hi or (other.hi == self.hi and other.hi_open):
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def __repr__(self):
        l = "(" if self.lo_open else "["
        r = ")" if self.hi_open else "]"
        return f"{l}{format_real(self.lo) if self.lo != -INF else '-inf'}, " \
               f"{format_real(self.hi) if self.hi != INF else 'inf'}{r}"


FULL = Interval()


def point(x: float) -> Interval:
    return Interval(x, x)


def iv_add(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo + b.lo, a.hi + b.hi,
                    a.lo_open or b.lo_open, a.hi_open or b.hi_open)


def iv_sub(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo - b.hi, a.hi - b.lo,
                    a.lo_open or b.hi_open, a.hi_open or b.lo_open)


def _mul_bound(x: float, xo: bool, y: float, yo: bool):
    # 0 * inf reads as 0 for bound candidates
    if (x == 0.0 and math.isinf(y)) or (y == 0.0 and math.isinf(x)):
        return (0.0, xo or yo)
    return (x * y, xo or yo)


def iv_mul(a: Interval, b: Interval) -> Interval:
    cands = [_mul_bound(x, xo, y, yo)
             for (x, xo) in ((a.lo, a.lo_open), (a.hi, a.hi_open))
             for (y, yo) in ((b.lo, b.lo_open), (b.hi, b.hi_open))]
    lo = min(v for v, _ in cands)
    hi = max(v for v, _ in cands)
    # a bound is open only when every candidate achieving it is open
    lo_open = all(o for v, o in cands if v == lo)
    hi_open = all(o for v, o in cands if v == hi)
    return Interval(lo, hi, lo_open, hi_open)


def iv_div(a: Interval, b: Interval) -> Optional[Interval]:
    """a / b, or None when b straddles zero (no sound single interval)."""
    if b.contains(0.0) or b.lo < 0.0 < b.hi:
        return None
    inv_cands = []
    for (y, yo) in ((b.lo, b.lo_open), (b.hi, b.hi_open)):
        if y == 0.0:
            inv_cands.append((math.copysign(INF, b.lo + b.hi), True))
        elif math.isinf(y):
            inv_cands.append((0.0, True))
        else:
            inv_cands.append((1.0 / y, yo))
    lo = min(v for v, _ in inv_cands)
    hi = max(v for v, _ in inv_cands)
    inv = Interval(lo, hi,
                   all(o for v, o in inv_cands if v == lo),
                   all(o for v, o in inv_cands if v == hi))
    return iv_mul(a, inv)


# ======================================================================
# Boxes: forward evaluation, backward narrowing
# ======================================================================

Box = dict  # var name -> Interval


def _numeric_expr(e: Expr) -> bool:
    if isinstance(e, (Basic, Var)):
        return True
    if isinstance(e, App) and e.symbol in ARITH and len(e.args) == 2:
        return all(_numeric_expr(a) for a in e.args)
    return False


def eval_box(e: Expr, box: Box) -> Optional[Interval]:
    """Interval enclosing the values of a numeric expression over the box."""
    if isinstance(e, Basic):
        return point(e.value)
    if isinstance(e, Var):
        return box.get(e.name, FULL)
    if isinstance(e, App) and e.symbol in ARITH and len(e.args) == 2:
        a = eval_box(e.args[0], box)
        b = eval_box(e.args[1], box)
        if a is None or b is None:
            return None
        if e.symbol == "+":
            return iv_add(a, b)
        if e.symbol == "-":
            return iv_sub(a, b)
        return iv_mul(a, b)
    return None


def narrow(e: Expr, target: Interval, box: Box) -> bool:
    """Intersect the values of e with target, narrowing box variables.

    Returns False when the constraint is certainly unsatisfiable over the
    box.  Narrowing descends only through single paths, which is sound
    regardless of repeated variables.
    """
    cur = eval_box(e, box)
    if cur is None:
        return True  # not a numeric expression here; nothing to do
    new = cur.intersect(target)
    if new.is_empty():
        return False
    if isinstance(e, Basic):
        return True
    if isinstance(e, Var):
        box[e.name] = new
        return True
    if isinstance(e, App) and e.symbol in ARITH:
        a, b = e.args
        ia = eval_box(a, box) or FULL
        ib = eval_box(b, box) or FULL
        if e.symbol == "+":
            return narrow(a, iv_sub(new, ib), box) and narrow(b, iv_sub(new, eval_box(a, box) or FULL), box)
        if e.symbol == "-":
            return narrow(a, iv_add(new, ib), box) and narrow(b, iv_sub(eval_box(a, box) or FULL, new), box)
        if e.symbol == "*":
            ta = iv_div(new, ib)
            if ta is not None and not narrow(a, ta, box):
                return False
            tb = iv_div(new, eval_box(a, box) or FULL)
            if tb is not None and not narrow(b, tb, box):
                return False
            return True
    return True


def _rel_enforce(symbol: str, lhs: Expr, rhs: Expr, box: Box) -> Optional[bool]:
    """Narrow box so that lhs symbol rhs holds; None means inconsistent."""
    if symbol in (">=", ">"):
        lhs, rhs = rhs, lhs
        symbol = "<=" if symbol == ">=" else "<"
    il = eval_box(lhs, box)
    ir = eval_box(rhs, box)
    if il is None or ir is None:
        return False  # outside the fragment, no narrowing
    strict = symbol == "<"
    if not narrow(lhs, Interval(-INF, ir.hi, False, ir.hi_open or strict), box):
        return None
    ir = eval_box(rhs, box) or FULL
    il = eval_box(lhs, box) or FULL
    if not narrow(rhs, Interval(il.lo, INF, il.lo_open or strict, False), box):
        return None
    return True


def _constraint_step(c: AtomicConstraint, box: Box) -> Optional[bool]:
    """One propagation pass for c over box.

    Returns None on detected inconsistency, True if the constraint was
    handled by the box fragment, False if it is outside the fragment.
    """
    want = c.result
    if c.symbol == "qVal" and want == TRUE:
        return None if not narrow(c.args[0], Interval(0.0, 1.0, True, False), box) else True
    if c.symbol == "qBound" and want == TRUE:
        x, y, z = c.args
        return _rel_enforce("<=", x, App("*", (y, z)), box)
    if c.symbol in RELS:
        if want == TRUE:
            return _rel_enforce(c.symbol, c.args[0], c.args[1], box)
        if want == FALSE:
            neg = {"<=": ">", "<": ">=", ">=": "<", ">": "<="}[c.symbol]
            return _rel_enforce(neg, c.args[0], c.args[1], box)
        return False
    if c.symbol == "==" and want in (TRUE, FALSE):
        a, b = c.args
        if _numeric_expr(a) and _numeric_expr(b):
            ia, ib = eval_box(a, box), eval_box(b, box)
            if want == TRUE:
                both = ia.intersect(ib)
                if both.is_empty():
                    return None
                if not narrow(a, both, box) or not narrow(b, both, box):
                    return None
                return True
            # disequality: only useful when one side is a point at a closed end
            if ia.lo == ia.hi and not ia.lo_open:
                if ib.lo == ib.hi and ib.lo == ia.lo and not ib.lo_open:
                    return None
                return True
            if ib.lo == ib.hi and not ib.lo_open:
                return True
            return True
        # ground structural (dis)equality
        if is_ground(a) and is_ground(b):
            v = _strict_equal(a, b)
            if v == want:
                return True
            if v != BOTTOM or _clash(a, b):
                return None if v != want and v != BOTTOM else False
            return False
        return False
    return False


def _iv_close(a: Interval, b: Interval, eps: float = 1e-13) -> bool:
    return a.lo_open == b.lo_open and a.hi_open == b.hi_open \
        and (a.lo == b.lo or abs(a.lo - b.lo) <= eps) \
        and (a.hi == b.hi or abs(a.hi - b.hi) <= eps)


def propagate(constraints, box: Box, rounds: int = 60) -> Optional[Box]:
    """Fixpoint propagation of all constraints; None means unsatisfiable.

    Stops once a round improves nothing beyond float noise; stopping early
    is sound (intervals are only ever over-approximated).
    """
    for _ in range(rounds):
        before = dict(box)
        for c in constraints:
            if _constraint_step(c, box) is None:
                return None
        for iv in box.values():
            if iv.is_empty():
                return None
        if all(k in before and _iv_close(before[k], v) for k, v in box.items()):
            break
    return box


# ======================================================================
# Ground truth of a constraint under a valuation
# ======================================================================

def _eval_ground_expr(e: Expr, val: dict) -> Expr:
    if isinstance(e, Var):
        if e.name not in val:
            return BOTTOM
        v = val[e.name]
        return Basic(v) if isinstance(v, float) else v
    if isinstance(e, App) and e.symbol in BUILTIN_PF:
        return eval_primitive(e.symbol, [_eval_ground_expr(a, val) for a in e.args])
    if isinstance(e, App) and e.args:
        return App(e.symbol, tuple(_eval_ground_expr(a, val) for a in e.args))
    return e


def holds_under(c: AtomicConstraint, val: dict) -> Optional[bool]:
    """Truth of the constraint under a (possibly partial) valuation."""
    args = [_eval_ground_expr(a, val) for a in c.args]
    res = eval_primitive(c.symbol, args) if c.symbol in BUILTIN_PF else None
    if res is None:
        return None
    want = _eval_ground_expr(c.result, val)
    if res == BOTTOM or isinstance(want, (Bottom, Var)):
        return None
    return res == want


# ======================================================================
# Satisfiability and entailment verdicts
# ======================================================================

@dataclass(frozen=True)
class SatResult:
    status: str                      # "sat" | "unsat" | "unknown"
    witness: Optional[dict] = None   # var -> float (or Expr for data)


@dataclass(frozen=True)
class EntailResult:
    status: str                      # "entailed" | "not_entailed" | "unknown"
    witness: Optional[dict] = None


def _pick_point(iv: Interval) -> float:
    if iv.hi != INF and not iv.hi_open:
        return iv.hi
    if iv.lo != -INF and not iv.lo_open:
        return iv.lo
    if iv.lo != -INF and iv.hi != INF:
        return (iv.lo + iv.hi) / 2.0
    if iv.hi != INF:
        return iv.hi - 1.0
    if iv.lo != -INF:
        return iv.lo + 1.0
    return 0.0


def _candidate_points(iv: Interval, rng: random.Random, n: int = 3):
    cands = [_pick_point(iv)]
    if iv.lo != -INF and iv.hi != INF:
        cands.append((iv.lo + iv.hi) / 2.0)
        if not iv.lo_open:
            cands.append(iv.lo)
        if not iv.hi_open:
            cands.append(iv.hi)
        for _ in range(n):
            cands.append(rng.uniform(iv.lo, iv.hi))
    elif iv.hi != INF:
        cands += [iv.hi - 1.0, iv.hi - 0.5, iv.hi - rng.uniform(1.0, 10.0)]
        if not iv.hi_open:
            cands.append(iv.hi)
    elif iv.lo != -INF:
        cands += [iv.lo + 1.0, iv.lo + 0.5, iv.lo + rng.uniform(1.0, 10.0)]
        if not iv.lo_open:
            cands.append(iv.lo)
    else:
        cands += [0.0, 1.0, -1.0, rng.uniform(-10.0, 10.0)]
    return [c for c in cands if iv.contains(c)]


def _all_hold(constraints, val: dict) -> bool:
    return all(holds_under(c, val) is True for c in constraints)


def satisfiable(constraints, seed: int = 0) -> SatResult:
    """Sound three-valued satisfiability of a primitive constraint set."""
    constraints = list(constraints)
    for c in constraints:
        if not vars_free(c):
            truth = holds_under(c, {})
            if truth is False:
                return SatResult("unsat")
    box = propagate(constraints, {})
    if box is None:
        return SatResult("unsat")
    names = sorted(box)
    rng = random.Random(seed)
    if not names:
        if _all_hold(constraints, {}):
            return SatResult("sat", {})
        return SatResult("unknown")
    columns = [_candidate_points(box[n], rng) or [_pick_point(box[n])] for n in names]
    tried = 0
    for combo in itertools.product(*columns):
        tried += 1
        if tried > 400:
            break
        val = dict(zip(names, combo))
        if _all_hold(constraints, val):
            return SatResult("sat", val)
    return SatResult("unknown")


def vars_free(c: AtomicConstraint) -> set:
    return vars_of(c)


def _provably_true(c: AtomicConstraint, box: Box) -> bool:
    """Whether c holds for every point of the box (sound check)."""
    if not vars_free(c):
        return holds_under(c, {}) is True
    want = c.result
    if c.symbol == "qVal" and want == TRUE:
        iv = eval_box(c.args[0], box)
        return iv is not None and iv.lo >= 0.0 and iv.hi <= 1.0 \
            and (iv.lo > 0.0 or iv.lo_open)
    if c.symbol in RELS or (c.symbol == "==" and want in (TRUE, FALSE)
                            and all(_numeric_expr(a) for a in c.args)):
        ia = eval_box(c.args[0], box)
        ib = eval_box(c.args[1], box)
        if ia is None or ib is None:
            return False
        sym, pos = c.symbol, want == TRUE
        if sym == "==":
            if pos:
                return ia.lo == ia.hi == ib.lo == ib.hi and not ia.lo_open and not ib.lo_open
            # provably never equal: disjoint ranges
            lt = ia.hi < ib.lo or (ia.hi == ib.lo and (ia.hi_open or ib.lo_open))
            gt = ib.hi < ia.lo or (ib.hi == ia.lo and (ib.hi_open or ia.lo_open))
            return lt or gt
        if not pos:
            sym = {"<=": ">", "<": ">=", ">=": "<", ">": "<="}[sym]
        if sym in (">", ">="):
            ia, ib = ib, ia
            sym = "<" if sym == ">" else "<="
        if sym == "<=":
            return ia.hi <= ib.lo
        if sym == "<":
            return ia.hi < ib.lo or (ia.hi == ib.lo and (ia.hi_open or ib.lo_open))
    return False


def entails(constraints, c: AtomicConstraint, seed: int = 0) -> EntailResult:
    """Sound three-valued entailment of one constraint by a set."""
    constraints = list(constraints)
    box = propagate(constraints, {})
    if box is None:
        return EntailResult("entailed")  # empty solution set entails anything
    for v in vars_free(c):
        box.setdefault(v, FULL)
    if _provably_true(c, box):
        return EntailResult("entailed")
    # hunt for a counterexample valuation in the box
    allvars = set(box) | vars_free(c)
    for p in constraints:
        allvars |= vars_free(p)
    names = sorted(allvars)
    rng = random.Random(seed)
    if not names:
        truth = holds_under(c, {})
        if truth is True:
            return EntailResult("entailed")
        if truth is False:
            return EntailResult("not_entailed", {})
        return EntailResult("unknown")
    columns = [_candidate_points(box.get(n, FULL), rng) or [0.0] for n in names]
    tried = 0
    for combo in itertools.product(*columns):
        tried += 1
        if tried > 400:
            break
        val = dict(zip(names, combo))
        if _all_hold(constraints, val) and holds_under(c, val) is False:
            return EntailResult("not_entailed", val)
    # last resort: if the hypothesis set plus the negation cannot be decided,
    # but ground evaluation settles c everywhere we sampled, report unknown
    return EntailResult("unknown")
