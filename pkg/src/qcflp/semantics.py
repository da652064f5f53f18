"""Declarative semantics: statements, proof trees, derivability, fixpoints.

A qualified statement asserts that an expression approximates to a term
(or that an atomic constraint holds) with at least a given qualification
value, under a set of primitive hypotheses.  Statements are derived by a
small rewriting logic whose rules are, informally:

* triv: anything whose result is undefined, or whose hypotheses are
  unsatisfiable, holds vacuously;
* refl: a variable or literal rewrites to itself;
* cons: constructor applications rewrite componentwise;
* fun:  a defined-function call rewrites through a rule instance whose
  conditions and right-hand side are themselves derivable, with the
  conclusion qualification bounded by the rule's attenuation factor
  applied to every premise qualification;
* prim/atom: primitive applications and atomic constraints hold when the
  hypotheses entail the evaluated form.

This module provides a structural checker for such proof trees, a
depth-bounded proof search that emits checkable trees, a statement
entailment test, and a bounded immediate-consequence iteration usable as
an executable oracle on finite universes.  A parallel qualification-free
variant of the same machinery (statements with no qualification) is used
to validate translated programs and solver answers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .constraints import entails, satisfiable
from .domains import QualDomain, U
from .syntax import (Program, _Parser, ParseError, Diagnostic, print_constraint,
                     print_expr)
from .terms import (App, AtomicConstraint, Basic, Bottom, BOTTOM, Expr, Var,
                    apply_subst, constraint_info_leq, info_leq, term_glb,
                    term_lub, vars_of)

CHECK_TOL = 1e-12


# ======================================================================
# Statements
# ======================================================================

@dataclass(frozen=True)
class QStatement:
    """A (possibly qualified) rewriting statement.

    Productions carry lhs and rhs; atomic statements carry atom.  The
    qualification is None for statements of the plain, qualification-free
    logic.  Hypotheses are a tuple of primitive atomic constraints.
    """

    lhs: Optional[Expr] = None
    rhs: Optional[Expr] = None
    atom: Optional[AtomicConstraint] = None
    qual: object = None
    hypotheses: tuple = ()

    def is_production(self) -> bool:
        return self.atom is None

    def with_qual(self, d) -> "QStatement":
        return QStatement(self.lhs, self.rhs, self.atom, d, self.hypotheses)


def production(lhs: Expr, rhs: Expr, qual=None, hypotheses=()) -> QStatement:
    return QStatement(lhs, rhs, None, qual, tuple(hypotheses))


def atom_statement(c: AtomicConstraint, qual=None, hypotheses=()) -> QStatement:
    return QStatement(None, None, c, qual, tuple(hypotheses))


def triviality(stmt: QStatement) -> str:
    """'yes' / 'no' / 'unknown': is the statement vacuously derivable?"""
    if stmt.is_production() and stmt.rhs == BOTTOM:
        return "yes"
    if not stmt.hypotheses:
        return "no"
    verdict = satisfiable(stmt.hypotheses)
    if verdict.status == "unsat":
        return "yes"
    if verdict.status == "sat":
        return "no"
    return "unknown"


# ======================================================================
# Statement entailment
# ======================================================================

def _match_upper(e: Expr, cap: Expr, uppers: dict) -> bool:
    """Constraints so that e instantiated stays below cap."""
    if isinstance(e, Bottom):
        return True
    if isinstance(e, Var):
        uppers.setdefault(e.name, []).append(cap)
        return True
    if isinstance(e, Basic):
        return isinstance(cap, Basic) and cap.value == e.value
    if isinstance(e, App):
        return isinstance(cap, App) and cap.symbol == e.symbol \
            and len(cap.args) == len(e.args) \
            and all(_match_upper(a, b, uppers) for a, b in zip(e.args, cap.args))
    return False


def _match_lower(t: Expr, floor: Expr, lowers: dict) -> bool:
    """Constraints so that t instantiated stays above floor."""
    if isinstance(floor, Bottom):
        return True
    if isinstance(t, Var):
        lowers.setdefault(t.name, []).append(floor)
        return True
    if isinstance(t, Bottom):
        return False
    if isinstance(t, Basic):
        return isinstance(floor, Basic) and floor.value == t.value
    if isinstance(t, App):
        return isinstance(floor, App) and floor.symbol == t.symbol \
            and len(floor.args) == len(t.args) \
            and all(_match_lower(a, b, lowers) for a, b in zip(t.args, floor.args))
    return False


def _prune(upper: Expr, lower: Expr) -> Expr:
    """Keep variables, keep structure the lower bound demands, drop the rest."""
    if isinstance(upper, (Var, Basic)):
        return upper
    if isinstance(lower, Bottom):
        return upper if isinstance(upper, Var) else BOTTOM
    if isinstance(upper, App) and isinstance(lower, App) \
            and upper.symbol == lower.symbol and len(upper.args) == len(lower.args):
        return App(upper.symbol, tuple(_prune(u, l)
                                       for u, l in zip(upper.args, lower.args)))
    return upper


def statement_entails(phi: QStatement, psi: QStatement,
                      dom: QualDomain = U) -> Optional[dict]:
    """A witness substitution under which phi subsumes psi, if one is found.

    The witness instantiates phi's variables so that the instantiated
    left side stays below psi's, the instantiated result stays above
    psi's, the qualification does not increase, and psi's hypotheses
    entail the instantiated hypotheses.  The search is structural and
    incomplete; None simply means no witness was found.
    """
    if phi.is_production() != psi.is_production():
        return None
    if phi.qual is not None:
        if psi.qual is None or not dom.leq(dom.coerce(psi.qual),
                                           dom.coerce(phi.qual), CHECK_TOL):
            return None
    uppers: dict = {}
    lowers: dict = {}
    if phi.is_production():
        if not _match_upper(phi.lhs, psi.lhs, uppers):
            return None
        if not _match_lower(phi.rhs, psi.rhs, lowers):
            return None
    else:
        a, b = phi.atom, psi.atom
        if a.symbol != b.symbol or len(a.args) != len(b.args):
            return None
        for x, y in zip((*a.args, a.result), (*b.args, b.result)):
            if not _match_upper(x, y, uppers):
                return None

    names = set(uppers) | set(lowers) | vars_of((phi.lhs, phi.rhs) if phi.is_production()
                                                else phi.atom)
    sigma_max: dict = {}
    sigma_pruned: dict = {}
    for name in sorted(names):
        cap: Optional[Expr] = None
        for u in uppers.get(name, []):
            cap = u if cap is None else term_glb(cap, u)
        floor: Expr = BOTTOM
        for l in lowers.get(name, []):
            joined = term_lub(floor, l)
            if joined is None:
                return None
            floor = joined
        if cap is None:
            sigma_max[name] = floor if not isinstance(floor, Bottom) else Var(name)
            sigma_pruned[name] = sigma_max[name]
            continue
        if not info_leq(floor, cap):
            return None
        sigma_max[name] = cap
        sigma_pruned[name] = _prune(cap, floor)
    for sigma in (sigma_pruned, sigma_max):
        if _verify_witness(phi, psi, sigma):
            return sigma
    return None


def _verify_witness(phi: QStatement, psi: QStatement, sigma: dict) -> bool:
    if phi.is_production():
        if not info_leq(apply_subst(phi.lhs, sigma), psi.lhs):
            return False
        if not info_leq(psi.rhs, apply_subst(phi.rhs, sigma)):
            return False
    else:
        if not constraint_info_leq(apply_subst(phi.atom, sigma), psi.atom):
            return False
    for c in phi.hypotheses:
        inst = apply_subst(c, sigma)
        if entails(psi.hypotheses, inst).status != "entailed":
            return False
    return True


# ======================================================================
# Proof trees and the checker
# ======================================================================

TAGS = ("triv", "refl", "cons", "fun", "prim", "atom")


@dataclass(frozen=True)
class ProofTree:
    tag: str
    conclusion: QStatement
    children: tuple = ()
    rule_index: Optional[int] = None
    theta: tuple = ()            # sorted (name, Expr) pairs for fun nodes

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


@dataclass(frozen=True)
class CheckResult:
    status: str                  # "valid" | "invalid" | "unknown"
    reason: str = ""


def instantiate_rule(rule, theta: dict):
    """The rule instance under a substitution (may introduce bottoms)."""
    return (tuple(apply_subst(p, theta) for p in rule.patterns),
            rule.attenuation,
            apply_subst(rule.rhs, theta),
            tuple(apply_subst(c, theta) for c in rule.conditions))


def check_proof(program: Program, dom: Optional[QualDomain],
                tree: ProofTree) -> CheckResult:
    """Validate a proof tree node by node against the program.

    dom None selects the qualification-free variant: statements carry no
    qualification and attenuation bounds are not checked.
    """
    try:
        return _check_node(program, dom, tree, path="root")
    except Exception as exc:  # malformed nodes surface as invalid
        return CheckResult("invalid", f"malformed tree: {exc}")


def _check_node(program, dom, tree: ProofTree, path: str) -> CheckResult:
    stmt = tree.conclusion
    if dom is not None:
        if stmt.qual is None:
            return CheckResult("invalid", f"{path}: missing qualification")
        if not dom.is_strict(dom.coerce(stmt.qual)):
            return CheckResult("invalid", f"{path}: qualification must be above bottom")
    elif stmt.qual is not None:
        return CheckResult("invalid", f"{path}: unexpected qualification")

    if tree.tag == "triv":
        if tree.children:
            return CheckResult("invalid", f"{path}: trivial nodes have no premises")
        t = triviality(stmt)
        if t == "yes":
            return CheckResult("valid")
        if t == "no":
            return CheckResult("invalid", f"{path}: statement is not trivial")
        return CheckResult("unknown", f"{path}: hypotheses satisfiability unknown")

    # the trivial rule is mandatory for trivial statements
    t = triviality(stmt)
    if t == "yes":
        return CheckResult("invalid", f"{path}: trivial statement proved by {tree.tag}")

    pi = stmt.hypotheses
    unknown = None

    def sub(i, child):
        return _check_node(program, dom, child, f"{path}.{i}")

    def qbound(d, bound) -> bool:
        if dom is None:
            return True
        return dom.leq(dom.coerce(d), dom.coerce(bound), CHECK_TOL)

    if tree.tag == "refl":
        if not stmt.is_production() or stmt.lhs != stmt.rhs \
                or not isinstance(stmt.lhs, (Var, Basic)):
            return CheckResult("invalid", f"{path}: not a reflexivity statement")
        if tree.children:
            return CheckResult("invalid", f"{path}: reflexivity has no premises")
        return CheckResult("valid")

    if tree.tag == "cons":
        if not stmt.is_production() or not isinstance(stmt.lhs, App) \
                or not isinstance(stmt.rhs, App) \
                or stmt.lhs.symbol != stmt.rhs.symbol \
                or len(stmt.lhs.args) != len(stmt.rhs.args) \
                or program.signature.kind(stmt.lhs.symbol) != "dc":
            return CheckResult("invalid", f"{path}: not a constructor decomposition")
        if len(tree.children) != len(stmt.lhs.args):
            return CheckResult("invalid", f"{path}: premise count mismatch")
        for i, (child, e, t_) in enumerate(zip(tree.children, stmt.lhs.args,
                                               stmt.rhs.args)):
            c = child.conclusion
            if not c.is_production() or c.lhs != e or c.rhs != t_ or c.hypotheses != pi:
                return CheckResult("invalid", f"{path}.{i}: premise shape mismatch")
            if not qbound(stmt.qual, c.qual):
                return CheckResult("invalid", f"{path}.{i}: qualification bound violated")
            r = sub(i, child)
            if r.status == "invalid":
                return r
            if r.status == "unknown":
                unknown = r
        return unknown or CheckResult("valid")

    if tree.tag == "fun":
        if not stmt.is_production() or not isinstance(stmt.lhs, App) \
                or program.signature.kind(stmt.lhs.symbol) != "df":
            return CheckResult("invalid", f"{path}: not a defined-function statement")
        if tree.rule_index is None or not (0 <= tree.rule_index < len(program.rules)):
            return CheckResult("invalid", f"{path}: bad rule index")
        rule = program.rules[tree.rule_index]
        if rule.name != stmt.lhs.symbol:
            return CheckResult("invalid", f"{path}: rule is for {rule.name!r}")
        theta = dict(tree.theta)
        pats, alpha, rhs, conds = instantiate_rule(rule, theta)
        n, m = len(pats), len(conds)
        if len(tree.children) != n + 1 + m:
            return CheckResult("invalid", f"{path}: premise count mismatch")
        for i in range(n):
            c = tree.children[i].conclusion
            if not c.is_production() or c.lhs != stmt.lhs.args[i] \
                    or c.rhs != pats[i] or c.hypotheses != pi:
                return CheckResult("invalid", f"{path}.{i}: argument premise mismatch")
            if not qbound(stmt.qual, c.qual):
                return CheckResult("invalid", f"{path}.{i}: qualification bound violated")
        c = tree.children[n].conclusion
        if not c.is_production() or c.lhs != rhs or c.rhs != stmt.rhs \
                or c.hypotheses != pi:
            return CheckResult("invalid", f"{path}.{n}: right-hand side premise mismatch")
        if dom is not None:
            a = dom.coerce(alpha)
            if not qbound(stmt.qual, dom.attenuate(a, dom.coerce(c.qual))):
                return CheckResult("invalid", f"{path}.{n}: attenuation bound violated")
        for j in range(m):
            c = tree.children[n + 1 + j].conclusion
            if c.is_production() or c.atom != conds[j] or c.hypotheses != pi:
                return CheckResult("invalid", f"{path}.{n+1+j}: condition premise mismatch")
            if dom is not None:
                a = dom.coerce(alpha)
                if not qbound(stmt.qual, dom.attenuate(a, dom.coerce(c.qual))):
                    return CheckResult("invalid",
                                       f"{path}.{n+1+j}: attenuation bound violated")
        for i, child in enumerate(tree.children):
            r = sub(i, child)
            if r.status == "invalid":
                return r
            if r.status == "unknown":
                unknown = r
        return unknown or CheckResult("valid")

    if tree.tag in ("prim", "atom"):
        if tree.tag == "prim":
            if not stmt.is_production() or not isinstance(stmt.lhs, App) \
                    or program.signature.kind(stmt.lhs.symbol) != "pf":
                return CheckResult("invalid", f"{path}: not a primitive statement")
            args, result = stmt.lhs.args, stmt.rhs
            symbol = stmt.lhs.symbol
            if not (isinstance(result, (Var, Basic))
                    or (isinstance(result, App) and not result.args)):
                return CheckResult("invalid", f"{path}: result must be flat")
        else:
            if stmt.is_production():
                return CheckResult("invalid", f"{path}: expected an atomic statement")
            args, result = stmt.atom.args, stmt.atom.result
            symbol = stmt.atom.symbol
        if len(tree.children) != len(args):
            return CheckResult("invalid", f"{path}: premise count mismatch")
        reduced = []
        for i, (child, e) in enumerate(zip(tree.children, args)):
            c = child.conclusion
            if not c.is_production() or c.lhs != e or c.hypotheses != pi:
                return CheckResult("invalid", f"{path}.{i}: argument premise mismatch")
            if not qbound(stmt.qual, c.qual):
                return CheckResult("invalid", f"{path}.{i}: qualification bound violated")
            reduced.append(c.rhs)
        for i, child in enumerate(tree.children):
            r = sub(i, child)
            if r.status == "invalid":
                return r
            if r.status == "unknown":
                unknown = r
        side = entails(pi, AtomicConstraint(symbol, tuple(reduced), result))
        if side.status == "not_entailed":
            return CheckResult("invalid", f"{path}: hypotheses do not entail the evaluation")
        if side.status == "unknown":
            return CheckResult("unknown", f"{path}: entailment undecided")
        return unknown or CheckResult("valid")

    return CheckResult("invalid", f"{path}: unknown tag {tree.tag!r}")


# ======================================================================
# Proof search
# ======================================================================

@dataclass(frozen=True)
class HoldsResult:
    status: str                  # "derivable" | "not_found" | "unknown"
    tree: Optional[ProofTree] = None


def _approx_tree(value: Expr, target: Expr, d, pi) -> Optional[ProofTree]:
    """A purely structural proof that value rewrites to target."""
    if isinstance(target, Bottom):
        return ProofTree("triv", production(value, BOTTOM, d, pi))
    if isinstance(value, (Var, Basic)):
        if value == target:
            return ProofTree("refl", production(value, value, d, pi))
        return None
    if isinstance(value, App) and isinstance(target, App) \
            and value.symbol == target.symbol and len(value.args) == len(target.args):
        kids = []
        for v, t in zip(value.args, target.args):
            k = _approx_tree(v, t, d, pi)
            if k is None:
                return None
            kids.append(k)
        return ProofTree("cons", production(value, target, d, pi), tuple(kids))
    return None


class ProofSearch:
    """Depth-bounded proof search over a qualified program.

    Rules whose conditions or right-hand side mention variables that do
    not occur in the head patterns are outside the search fragment and
    make the outcome unknown rather than failed.
    """

    def __init__(self, program: Program, dom: QualDomain = U, budget: int = 200000):
        self.program = program
        self.sig = program.signature
        self.dom = dom
        self.unknown = False
        self.budget = budget
        self._rules = {}
        for i, r in enumerate(program.rules):
            self._rules.setdefault(r.name, []).append((i, r))

    def _tick(self) -> bool:
        self.budget -= 1
        if self.budget <= 0:
            self.unknown = True
            return False
        return True

    def reduce(self, e: Expr, pi: tuple, depth: int, need=None) -> Iterator[tuple]:
        """Yield (result term, qualification, proof tree) for e.

        need is a lower bound the derivation's qualification must reach;
        rule branches whose attenuation cannot reach it are failed
        outright, which keeps recursive programs searchable.
        """
        if not self._tick():
            return
        dom = self.dom
        if need is None:
            need = dom.bottom()
        if isinstance(e, Bottom):
            yield BOTTOM, dom.top(), ProofTree("triv",
                                               production(BOTTOM, BOTTOM,
                                                          dom.top(), pi))
            return
        if isinstance(e, (Var, Basic)):
            yield e, dom.top(), ProofTree("refl", production(e, e, dom.top(), pi))
            return
        kind = self.sig.kind(e.symbol)
        if kind == "dc" or kind is None:
            for parts in self._reduce_seq(list(e.args), pi, depth, need):
                terms = tuple(p[0] for p in parts)
                quals = [p[1] for p in parts]
                trees = tuple(p[2] for p in parts)
                d = dom.glb_all(quals)
                res = App(e.symbol, terms)
                yield res, d, ProofTree("cons", production(e, res, d, pi), trees)
            return
        if kind == "pf":
            from .constraints import eval_primitive
            for parts in self._reduce_seq(list(e.args), pi, depth, need):
                terms = [p[0] for p in parts]
                d = dom.glb_all(p[1] for p in parts)
                try:
                    v = eval_primitive(e.symbol, terms)
                except Exception:
                    continue
                if v == BOTTOM:
                    if any(vars_of(t) for t in terms):
                        self.unknown = True
                    continue
                tree = ProofTree("prim", production(e, v, d, pi),
                                 tuple(p[2] for p in parts))
                yield v, d, tree
            return
        # defined function
        if depth <= 0:
            self.unknown = True
            return
        for index, rule in self._rules.get(e.symbol, []):
            alpha = self.dom.coerce(rule.attenuation)
            inner_need = self.dom.factor_residual(need, alpha)
            if inner_need is None:
                continue  # this rule can never reach the required bound
            head_vars = vars_of(rule.patterns)
            extra = (vars_of(rule.rhs) | vars_of(rule.conditions)) - head_vars
            if extra:
                self.unknown = True
                continue
            for combo in self._match_args(list(rule.patterns), list(e.args),
                                          pi, depth, {}, need):
                theta, arg_parts = combo
                inst_conds = [apply_subst(c, theta) for c in rule.conditions]
                for cond_parts in self._atoms_seq(inst_conds, pi, depth - 1, inner_need):
                    rhs_inst = apply_subst(rule.rhs, theta)
                    for t, d0, rhs_tree in self.reduce(rhs_inst, pi, depth - 1, inner_need):
                        quals = [p[1] for p in arg_parts]
                        quals.append(self.dom.attenuate(alpha, d0))
                        quals += [self.dom.attenuate(alpha, p[0]) for p in cond_parts]
                        d = self.dom.glb_all(quals)
                        if not self.dom.is_strict(d):
                            continue
                        children = tuple(p[2] for p in arg_parts) + (rhs_tree,) \
                            + tuple(p[1] for p in cond_parts)
                        tree = ProofTree("fun", production(e, t, d, pi), children,
                                         rule_index=index,
                                         theta=tuple(sorted((k, v) for k, v in theta.items())))
                        yield t, d, tree
        return

    def _reduce_seq(self, exprs: list, pi: tuple, depth: int, need) -> Iterator[list]:
        if not exprs:
            yield []
            return
        for first in self.reduce(exprs[0], pi, depth, need):
            for rest in self._reduce_seq(exprs[1:], pi, depth, need):
                yield [first] + rest

    def _match_args(self, pats: list, args: list, pi: tuple, depth: int,
                    theta: dict, need) -> Iterator[tuple]:
        if not pats:
            yield dict(theta), []
            return
        for s, d, tree in self.reduce(args[0], pi, depth, need):
            binding = {}
            if self._match(pats[0], s, binding):
                theta2 = dict(theta)
                theta2.update(binding)
                for t2, rest in self._match_args(pats[1:], args[1:], pi, depth,
                                                 theta2, need):
                    yield t2, [(s, d, tree)] + rest

    def _match(self, pat: Expr, value: Expr, out: dict) -> bool:
        if isinstance(pat, Var):
            out[pat.name] = value
            return True
        if isinstance(pat, Basic):
            return isinstance(value, Basic) and value.value == pat.value
        if isinstance(pat, App):
            return isinstance(value, App) and value.symbol == pat.symbol \
                and len(value.args) == len(pat.args) \
                and all(self._match(p, v, out) for p, v in zip(pat.args, value.args))
        return False

    def atom_quals(self, c: AtomicConstraint, pi: tuple, depth: int,
                   need=None) -> Iterator[tuple]:
        """Yield (qualification, proof tree) for a derivable atomic statement."""
        if need is None:
            need = self.dom.bottom()
        for parts in self._reduce_seq(list(c.args), pi, depth, need):
            terms = tuple(p[0] for p in parts)
            d = self.dom.glb_all(p[1] for p in parts)
            side = entails(pi, AtomicConstraint(c.symbol, terms, c.result))
            if side.status == "unknown":
                self.unknown = True
                continue
            if side.status == "entailed":
                tree = ProofTree("atom", atom_statement(c, d, pi),
                                 tuple(p[2] for p in parts))
                yield d, tree

    def _atoms_seq(self, cs: list, pi: tuple, depth: int, need) -> Iterator[list]:
        if not cs:
            yield []
            return
        for first in self.atom_quals(cs[0], pi, depth, need):
            for rest in self._atoms_seq(cs[1:], pi, depth, need):
                yield [first] + rest


def weaken_tree(tree: ProofTree, rhs: Optional[Expr], d, dom: QualDomain) -> Optional[ProofTree]:
    """Rebuild a production proof to conclude a smaller result or qualification."""
    stmt = tree.conclusion
    if stmt.is_production():
        target = stmt.rhs if rhs is None else rhs
        if isinstance(target, Bottom):
            return ProofTree("triv", production(stmt.lhs, BOTTOM, d, stmt.hypotheses))
        if tree.tag == "refl":
            if target != stmt.lhs:
                return None
            return ProofTree("refl", production(stmt.lhs, target, d, stmt.hypotheses))
        if tree.tag == "cons":
            if not (isinstance(target, App) and target.symbol == stmt.rhs.symbol
                    and len(target.args) == len(stmt.rhs.args)):
                return None
            kids = []
            for child, t2 in zip(tree.children, target.args):
                k = weaken_tree(child, t2, child.conclusion.qual, dom)
                if k is None:
                    return None
                kids.append(k)
            return ProofTree("cons", production(stmt.lhs, target, d, stmt.hypotheses),
                             tuple(kids))
        if tree.tag == "fun":
            n = len(stmt.lhs.args)
            rhs_child = weaken_tree(tree.children[n], target,
                                    tree.children[n].conclusion.qual, dom)
            if rhs_child is None:
                return None
            kids = tree.children[:n] + (rhs_child,) + tree.children[n + 1:]
            return ProofTree("fun", production(stmt.lhs, target, d, stmt.hypotheses),
                             kids, tree.rule_index, tree.theta)
        if tree.tag == "prim":
            if target != stmt.rhs:
                return None
            return ProofTree("prim", production(stmt.lhs, target, d, stmt.hypotheses),
                             tree.children)
        if tree.tag == "triv":
            return tree if isinstance(target, Bottom) else None
        return None
    # atomic statements only weaken in qualification
    return ProofTree(tree.tag, stmt.with_qual(d), tree.children,
                     tree.rule_index, tree.theta)


def holds(program: Program, dom: QualDomain, stmt: QStatement,
          depth: int = 8, budget: int = 200000) -> HoldsResult:
    """Bounded derivability of a qualified statement."""
    d = dom.coerce(stmt.qual)
    if triviality(stmt) == "yes":
        return HoldsResult("derivable", ProofTree("triv", stmt))
    search = ProofSearch(program, dom, budget)
    if stmt.is_production():
        for s, m, tree in search.reduce(stmt.lhs, stmt.hypotheses, depth, d):
            if info_leq(stmt.rhs, s) and dom.leq(d, m, CHECK_TOL):
                out = weaken_tree(tree, stmt.rhs, stmt.qual, dom)
                if out is not None:
                    return HoldsResult("derivable", out)
    else:
        for m, tree in search.atom_quals(stmt.atom, stmt.hypotheses, depth, d):
            if dom.leq(d, m, CHECK_TOL):
                return HoldsResult("derivable",
                                   weaken_tree(tree, None, stmt.qual, dom))
    return HoldsResult("unknown" if search.unknown else "not_found")


# ======================================================================
# Bounded immediate-consequence iteration
# ======================================================================

@dataclass
class Interpretation:
    """Finitely many non-trivial facts; closure is implicit at query time."""

    facts: dict = field(default_factory=dict)   # (f,args,result,pi_idx) -> [quals]
    partial: bool = False

    def add(self, key, d, dom: QualDomain) -> bool:
        row = self.facts.setdefault(key, [])
        for existing in row:
            if dom.leq(d, existing, CHECK_TOL):
                return False
        row[:] = [x for x in row if not dom.leq(x, d, CHECK_TOL)]
        row.append(d)
        return True

    def copy(self) -> "Interpretation":
        out = Interpretation({k: list(v) for k, v in self.facts.items()}, self.partial)
        return out

    def __eq__(self, other):
        return isinstance(other, Interpretation) and self.facts == other.facts

    def max_quals(self, fname: str, args: tuple, result: Expr, pi_idx: int,
                  dom: QualDomain) -> list:
        """Maximal qualifications for a fact, using entailment closure."""
        out: list = []
        for (f, a, t, p), quals in self.facts.items():
            if f != fname or p != pi_idx or len(a) != len(args):
                continue
            if all(info_leq(x, y) for x, y in zip(args, a)) and info_leq(result, t):
                for d in quals:
                    if not any(dom.leq(d, o, CHECK_TOL) for o in out):
                        out = [o for o in out if not dom.leq(o, d, CHECK_TOL)]
                        out.append(d)
        return out


class _FactReducer:
    """Derivability of ground premises from an interpretation's facts."""

    def __init__(self, interp: Interpretation, program: Program, dom: QualDomain,
                 pi: tuple, pi_idx: int):
        self.interp = interp
        self.sig = program.signature
        self.dom = dom
        self.pi = pi
        self.pi_idx = pi_idx

    def reduce(self, e: Expr) -> Iterator[tuple]:
        dom = self.dom
        if isinstance(e, Bottom):
            yield BOTTOM, dom.top()
            return
        if isinstance(e, (Var, Basic)):
            yield e, dom.top()
            return
        kind = self.sig.kind(e.symbol)
        if kind == "dc" or kind is None:
            for parts in self._seq(list(e.args)):
                yield App(e.symbol, tuple(p[0] for p in parts)), \
                    dom.glb_all(p[1] for p in parts)
            return
        if kind == "pf":
            from .constraints import eval_primitive
            for parts in self._seq(list(e.args)):
                try:
                    v = eval_primitive(e.symbol, [p[0] for p in parts])
                except Exception:
                    continue
                if v != BOTTOM:
                    yield v, dom.glb_all(p[1] for p in parts)
            return
        # defined symbol: consult the facts
        for (f, fargs, t, p), quals in self.interp.facts.items():
            if f != e.symbol or p != self.pi_idx or len(fargs) != len(e.args):
                continue
            for parts in self._seq(list(e.args)):
                if all(info_leq(fa, u) for fa, (u, _) in zip(fargs, parts)):
                    d_args = self.dom.glb_all(p2[1] for p2 in parts)
                    for d0 in quals:
                        yield t, self.dom.glb(d0, d_args)

    def _seq(self, exprs: list) -> Iterator[list]:
        if not exprs:
            yield []
            return
        for first in self.reduce(exprs[0]):
            for rest in self._seq(exprs[1:]):
                yield [first] + rest

    def atom_quals(self, c: AtomicConstraint) -> list:
        out = []
        for parts in self._seq(list(c.args)):
            side = entails(self.pi, AtomicConstraint(c.symbol,
                                                     tuple(p[0] for p in parts),
                                                     c.result))
            if side.status == "entailed":
                d = self.dom.glb_all(p[1] for p in parts)
                if not any(self.dom.eq(d, o, CHECK_TOL) for o in out):
                    out.append(d)
        return out


def bounded_lfp(program: Program, dom: QualDomain, k: int, universe: list,
                quals: Optional[list] = None, pis: Optional[list] = None,
                budget: int = 2000000) -> Interpretation:
    """Iterate the immediate-consequence step k times over a finite family.

    universe is a finite list of ground terms used to instantiate rule
    variables; quals optionally restricts recorded qualification values
    to a grid; pis is the family of hypothesis sets (default: the empty
    set only).  A blown budget sets the partial flag.
    """
    pis = [()] if pis is None else [tuple(p) for p in pis]
    interp = Interpretation()
    steps = 0
    for _ in range(k):
        new = interp.copy()
        changed = False
        for rule in program.rules:
            rule_vars = sorted(vars_of(rule.patterns) | vars_of(rule.rhs)
                               | vars_of(rule.conditions))
            alpha = dom.coerce(rule.attenuation)
            for pi_idx, pi in enumerate(pis):
                red = _FactReducer(interp, program, dom, pi, pi_idx)
                for combo in itertools.product(universe, repeat=len(rule_vars)):
                    steps += 1
                    if steps > budget:
                        new.partial = True
                        interp = new
                        return interp
                    theta = dict(zip(rule_vars, combo))
                    cond_sets = []
                    ok = True
                    for c in rule.conditions:
                        ds = red.atom_quals(apply_subst(c, theta))
                        if not ds:
                            ok = False
                            break
                        cond_sets.append(ds)
                    if not ok:
                        continue
                    head_args = tuple(apply_subst(p, theta) for p in rule.patterns)
                    rhs_inst = apply_subst(rule.rhs, theta)
                    for t, d0 in red.reduce(rhs_inst):
                        if isinstance(t, Bottom):
                            continue
                        for cond_combo in itertools.product(*cond_sets):
                            d = dom.attenuate(alpha, dom.glb_all((d0, *cond_combo)))
                            if not dom.is_strict(d):
                                continue
                            key = (rule.name, head_args, t, pi_idx)
                            for dd in _grid_clip(d, quals, dom):
                                if new.add(key, dd, dom):
                                    changed = True
        if not changed:
            interp = new
            break
        interp = new
    return interp


def _grid_clip(d, quals, dom: QualDomain) -> list:
    if quals is None:
        return [d]
    below = [q for q in quals if dom.leq(q, d, CHECK_TOL)]
    out = []
    for q in below:
        if not any(dom.leq(q, o, CHECK_TOL) and not dom.eq(q, o, CHECK_TOL) for o in below if o is not q):
            if not any(dom.eq(q, o, CHECK_TOL) for o in out):
                out.append(q)
    return out


def factor_grid(program: Program, dom: QualDomain, depth: int = 4) -> list:
    """Attenuation factors closed under the attenuation product, plus top."""
    base = {dom.top()}
    for r in program.rules:
        base.add(dom.coerce(r.attenuation))
    grid = set()
    frontier = {dom.top()}
    for _ in range(depth):
        nxt = set()
        for g in frontier:
            for b in base:
                v = dom.attenuate(g, b)
                key = tuple(dom.split(v))
                if key not in {tuple(dom.split(x)) for x in grid | nxt}:
                    nxt.add(v)
        grid |= nxt
        frontier = nxt
    return sorted(grid, key=lambda v: dom.split(v))


# ======================================================================
# Statement and certificate input/output
# ======================================================================

def parse_statement(text: str) -> QStatement:
    p = _Parser(text)
    save = p.pos
    stmt = None
    if p.at("("):
        try:
            p.next()
            lhs = p.parse_expr()
            if p.peek().kind in ("->", "-->"):
                p.next()
                rhs = p.parse_expr()
                p.expect(")")
                stmt = (lhs, rhs)
            else:
                p.pos = save
        except ParseError:
            p.pos = save
    if stmt is None:
        c = p.parse_constraint()
    qual = None
    if p.at("#"):
        p.next()
        qual = p.parse_qual_literal()
    hyps = ()
    if p.at("<=="):
        p.next()
        hyps = tuple(p.parse_constraint_list())
    p.expect("EOF")
    if stmt is not None:
        return production(stmt[0], stmt[1], qual, hyps)
    return atom_statement(c, qual, hyps)


def print_statement(stmt: QStatement, dom: Optional[QualDomain] = None) -> str:
    if stmt.is_production():
        body = f"({print_expr(stmt.lhs)} -> {print_expr(stmt.rhs)})"
    else:
        body = print_constraint(stmt.atom)
    if stmt.qual is not None:
        d = dom.format(dom.coerce(stmt.qual)) if dom else _fmt_raw(stmt.qual)
        body += f" # {d}"
    if stmt.hypotheses:
        body += " <== " + ", ".join(print_constraint(c) for c in stmt.hypotheses)
    return body


def _fmt_raw(q) -> str:
    if isinstance(q, tuple):
        return "(" + ",".join(_fmt_raw(x) for x in q) + ")"
    from .terms import format_real
    return format_real(float(q))


def serialize_proof(tree: ProofTree, domain_name: str, dom: Optional[QualDomain]) -> str:
    """Line-oriented certificate: header plus one node per line."""
    nodes = []

    def walk(t: ProofTree) -> int:
        child_ids = [walk(c) for c in t.children]
        idx = len(nodes)
        theta = "-"
        if t.theta:
            theta = "{" + "; ".join(f"{k} -> {print_expr(v)}" for k, v in t.theta) + "}"
        nodes.append((idx, t.tag,
                      "-" if t.rule_index is None else str(t.rule_index),
                      theta,
                      ",".join(map(str, child_ids)) or "-",
                      print_statement(t.conclusion, dom)))
        return idx

    root = walk(tree)
    lines = ["qcflp-proof v1", f"domain {domain_name}", f"nodes {len(nodes)}",
             f"root {root}"]
    for idx, tag, rule, theta, kids, concl in nodes:
        lines.append("\t".join([str(idx), tag, rule, theta, kids, concl]))
    return "\n".join(lines) + "\n"


def parse_proof(text: str) -> tuple:
    """Returns (domain name, ProofTree)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split() != ["qcflp-proof", "v1"]:
        raise ParseError([Diagnostic(1, 1, "not a proof certificate")])
    domain_name = lines[1].split()[1]
    count = int(lines[2].split()[1])
    root = int(lines[3].split()[1])
    built: dict = {}
    for ln in lines[4:4 + count]:
        idx_s, tag, rule_s, theta_s, kids_s, concl_s = ln.split("\t")
        idx = int(idx_s)
        theta = ()
        if theta_s != "-":
            pairs = []
            body = theta_s.strip()[1:-1]
            if body.strip():
                for part in body.split(";"):
                    name, _, rhs = part.partition("->")
                    p = _Parser(rhs.strip())
                    pairs.append((name.strip(), p.parse_expr()))
            theta = tuple(pairs)
        kids = () if kids_s == "-" else tuple(built[int(k)] for k in kids_s.split(","))
        stmt = parse_statement(concl_s)
        if domain_name == "-":
            stmt = QStatement(stmt.lhs, stmt.rhs, stmt.atom, None, stmt.hypotheses)
        built[idx] = ProofTree(tag, stmt,
                               kids,
                               None if rule_s == "-" else int(rule_s),
                               theta)
    return domain_name, built[root]
