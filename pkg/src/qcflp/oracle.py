"""Cross-validation of the solver against the fixpoint semantics.

Both engines answer the same question for ground goals over a finite
universe: with which maximal qualifications is a fact derivable?  The
fixpoint side iterates immediate consequences; the solver side runs the
translated program and reads the upper bounds of the qualification
intervals.  Disagreements indicate a bug in the transformation or in
either engine, so a seeded mutation of the transformation must surface
here as a mismatch.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .domains import QualDomain, U
from .runtime import Limits, Solver
from .semantics import bounded_lfp
from .syntax import Goal, GoalItem, Program, print_expr
from .terms import (App, AtomicConstraint, Expr, TRUE, is_ground,
                    is_term, is_total)
from .transform import transform_goal, transform_program

TOL = 1e-9


@dataclass
class OracleRecord:
    goal: str
    fixpoint: list
    solver: list
    match: bool
    note: str = ""


@dataclass
class OracleReport:
    records: list = field(default_factory=list)
    partial: bool = False

    @property
    def mismatches(self) -> list:
        return [r for r in self.records if not r.match]


def default_universe(program: Program, limit: int = 24) -> list:
    """Ground constructor terms mentioned by the program, small ones first."""
    seen = []

    def visit(e: Expr):
        if isinstance(e, App):
            for a in e.args:
                visit(a)
        if is_term(e, program.signature) and is_ground(e) and is_total(e) \
                and e not in seen:
            seen.append(e)

    for r in program.rules:
        for p in r.patterns:
            visit(p)
        visit(r.rhs)
        for c in r.conditions:
            for x in (*c.args, c.result):
                visit(x)
    seen.sort(key=lambda e: (_size(e), print_expr(e)))
    return seen[:limit]


def _size(e: Expr) -> int:
    if isinstance(e, App):
        return 1 + sum(_size(a) for a in e.args)
    return 1


def _antichain(points: list, tol: float = TOL) -> list:
    """Maximal elements of a list of component tuples, componentwise order."""
    uniq = []
    for p in points:
        if not any(all(abs(x - y) <= tol for x, y in zip(p, q)) for q in uniq):
            uniq.append(p)
    out = [p for p in uniq
           if not any(q is not p
                      and all(x <= y + tol for x, y in zip(p, q))
                      and any(y > x + tol for x, y in zip(p, q))
                      for q in uniq)]
    return sorted(out)


def _sets_match(a: list, b: list, tol: float = TOL) -> bool:
    if len(a) != len(b):
        return False
    return all(all(abs(x - y) <= tol for x, y in zip(p, q))
               for p, q in zip(sorted(a), sorted(b)))


def compare(program: Program, dom: QualDomain = U, k: int = 6,
            universe: Optional[list] = None, depth: int = 8,
            drop_site: Optional[int] = None, max_goals: int = 400,
            lfp_budget: int = 2000000) -> OracleReport:
    """Compare fixpoint-derived facts with solver answers over a goal family."""
    report = OracleReport()
    universe = default_universe(program) if universe is None else list(universe)
    interp = bounded_lfp(program, dom, k, universe, budget=lfp_budget)
    report.partial = interp.partial

    translated, _ = transform_program(program, dom, drop_site=drop_site)
    leaf_count = len(dom.leaf_suffixes())

    goals = 0
    for fname, arity in sorted(program.signature.df.items()):
        for args in itertools.product(universe, repeat=arity):
            for target in universe:
                goals += 1
                if goals > max_goals:
                    report.partial = True
                    return report
                call = App(fname, tuple(args))
                constraint = AtomicConstraint("==", (call, target), TRUE)
                fix = [tuple(dom.split(d))
                       for d in interp.max_quals(fname, tuple(args), target, 0, dom)]
                fix = _antichain(fix)

                goal = Goal((GoalItem(constraint, "W", None),))
                cs, wn, dv = transform_goal(goal, program, dom)
                solver = Solver(translated, dom, Limits(depth=depth))
                corners = []
                note = ""
                for ans in solver.solve(cs, wn, dv):
                    if "conditional" in ans.flags or "malformed-qual" in ans.flags:
                        note = "flagged answer: " + ",".join(ans.flags)
                        continue
                    corner = []
                    for suf in dom.leaf_suffixes():
                        iv = ans.qual["W" + suf]
                        corner.append(iv.hi)
                        if iv.hi == float("inf"):
                            note = "unbounded qualification"
                    corners.append(tuple(corner))
                run = _antichain(corners)
                match = _sets_match(fix, run)
                if fix or run or not match:
                    report.records.append(OracleRecord(
                        f"{print_expr(call)} == {print_expr(target)}",
                        fix, run, match, note))
    return report


def count_qual_sites(program: Program, dom: QualDomain = U) -> int:
    """How many qualification constraints the transformation emits."""
    from .transform import Emitter, FreshSupply, transform_rule
    from .terms import vars_of
    avoid = set()
    for r in program.rules:
        avoid |= vars_of(r.patterns) | vars_of(r.rhs) | vars_of(r.conditions)
    supply = FreshSupply(0, avoid)
    em = Emitter(dom)
    for r in program.rules:
        transform_rule(r, program.signature, supply, em)
    return em.next_site
