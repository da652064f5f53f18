"""Core term language: expressions, signatures, substitutions, constraints.

Expressions are applicative first-order terms over a signature of data
constructors, primitive functions and defined functions, extended with a
distinguished undefined value (bottom) and real-valued literals.  A
(constructor) term is an expression whose applications use constructors
only; patterns and computed results are terms.

The information ordering makes bottom the least element and compares
everything else structurally; it is the ordering in which partial results
approximate total ones.

Atomic constraints pair a primitive symbol with argument expressions and
an expected result (a variable, a nullary constructor or a literal).
Constraint sets are finite conjunctions of atomic constraints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union


# ======================================================================
# Expressions
# ======================================================================

@dataclass(frozen=True)
class Bottom:
    def __repr__(self):
        return "_|_"


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Basic:
    value: float

    def __repr__(self):
        return format_real(self.value)


@dataclass(frozen=True)
class App:
    symbol: str
    args: tuple = ()

    def __repr__(self):
        if not self.args:
            return self.symbol
        return f"{self.symbol}({', '.join(map(repr, self.args))})"


Expr = Union[Bottom, Var, Basic, App]

BOTTOM = Bottom()
TRUE = App("true")
FALSE = App("false")
NIL = App("[]")


def cons(head: Expr, tail: Expr) -> App:
    return App(":", (head, tail))


def mklist(items: Iterable[Expr]) -> Expr:
    out: Expr = NIL
    for item in reversed(list(items)):
        out = cons(item, out)
    return out


def mkstring(text: str) -> Expr:
    return mklist([char_atom(c) for c in text])


def char_atom(c: str) -> App:
    return App(f"'{c}'")


def is_char_atom(e: Expr) -> bool:
    return isinstance(e, App) and not e.args and len(e.symbol) >= 3 \
        and e.symbol[0] == "'" and e.symbol[-1] == "'"


def format_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


# ======================================================================
# Signatures
# ======================================================================

BUILTIN_DC = {"true": 0, "false": 0, "[]": 0, ":": 2}
BUILTIN_PF = {"+": 2, "-": 2, "*": 2,
              "<=": 2, "<": 2, ">=": 2, ">": 2,
              "==": 2, "qVal": 1, "qBound": 3}
COMPARISONS = ("==", "/=", "<=", "<", ">=", ">")


class SignatureError(ValueError):
    pass


@dataclass
class Signature:
    """Symbol table: constructor, primitive and defined-function arities.

    The three families are kept disjoint.  Character atoms (quoted single
    characters) are implicitly nullary constructors and need not be
    registered.
    """

    dc: dict = field(default_factory=lambda: dict(BUILTIN_DC))
    pf: dict = field(default_factory=lambda: dict(BUILTIN_PF))
    df: dict = field(default_factory=dict)

    def copy(self) -> "Signature":
        return Signature(dict(self.dc), dict(self.pf), dict(self.df))

    def kind(self, symbol: str) -> Optional[str]:
        if symbol in self.dc or (len(symbol) >= 3 and symbol[0] == "'"):
            return "dc"
        if symbol in self.pf:
            return "pf"
        if symbol in self.df:
            return "df"
        return None

    def arity(self, symbol: str) -> int:
        for table in (self.dc, self.pf, self.df):
            if symbol in table:
                return table[symbol]
        if len(symbol) >= 3 and symbol[0] == "'":
            return 0
        raise SignatureError(f"unknown symbol {symbol!r}")

    def register_dc(self, symbol: str, arity: int) -> None:
        if symbol in self.pf or symbol in self.df:
            raise SignatureError(f"symbol {symbol!r} already used with a different role")
        old = self.dc.get(symbol)
        if old is not None and old != arity:
            raise SignatureError(f"constructor {symbol!r} used with arities {old} and {arity}")
        self.dc[symbol] = arity

    def register_df(self, symbol: str, arity: int) -> None:
        if symbol in self.pf or symbol in self.dc:
            raise SignatureError(f"symbol {symbol!r} already used with a different role")
        old = self.df.get(symbol)
        if old is not None and old != arity:
            raise SignatureError(f"function {symbol!r} defined with arities {old} and {arity}")
        self.df[symbol] = arity

    def __eq__(self, other):
        return isinstance(other, Signature) and self.dc == other.dc \
            and self.pf == other.pf and self.df == other.df


# ======================================================================
# Constraints
# ======================================================================

@dataclass(frozen=True)
class AtomicConstraint:
    """p(args) == result, with result a variable, nullary constructor or literal.

    The bare form p(args) abbreviates result true; e1 /= e2 abbreviates
    (e1 == e2) == false.
    """

    symbol: str
    args: tuple
    result: Expr = TRUE

    def __repr__(self):
        return f"{self.symbol}({', '.join(map(repr, self.args))}) == {self.result!r}"


ConstraintSet = tuple  # of AtomicConstraint, read conjunctively


def constraint_exprs(c: AtomicConstraint) -> Iterator[Expr]:
    yield from c.args
    yield c.result


def is_primitive_constraint(c: AtomicConstraint, sig: Signature) -> bool:
    return all(not contains_df(e, sig) for e in constraint_exprs(c))


def contains_df(e: Expr, sig: Signature) -> bool:
    if isinstance(e, App):
        if sig.kind(e.symbol) == "df":
            return True
        return any(contains_df(a, sig) for a in e.args)
    return False


# ======================================================================
# Substitutions
# ======================================================================

Subst = dict  # var name -> Expr


def apply_subst(obj, sigma: Subst):
    """Capture-free simultaneous replacement of variables in obj.

    Works over expressions, atomic constraints, and tuples/lists of such.
    """
    if isinstance(obj, Var):
        return sigma.get(obj.name, obj)
    if isinstance(obj, App):
        if not obj.args:
            return obj
        return App(obj.symbol, tuple(apply_subst(a, sigma) for a in obj.args))
    if isinstance(obj, (Bottom, Basic)):
        return obj
    if isinstance(obj, AtomicConstraint):
        return AtomicConstraint(obj.symbol,
                                tuple(apply_subst(a, sigma) for a in obj.args),
                                apply_subst(obj.result, sigma))
    if isinstance(obj, tuple):
        return tuple(apply_subst(x, sigma) for x in obj)
    if isinstance(obj, list):
        return [apply_subst(x, sigma) for x in obj]
    raise TypeError(f"cannot substitute in {obj!r}")


def compose_subst(sigma: Subst, tau: Subst) -> Subst:
    """Composition: applying the result equals applying sigma then tau."""
    out = {x: apply_subst(e, tau) for x, e in sigma.items()}
    for y, e in tau.items():
        if y not in out:
            out[y] = e
    return out


def vars_of(obj) -> set:
    acc: set = set()
    _collect_vars(obj, acc)
    return acc


def _collect_vars(obj, acc: set) -> None:
    if isinstance(obj, Var):
        acc.add(obj.name)
    elif isinstance(obj, App):
        for a in obj.args:
            _collect_vars(a, acc)
    elif isinstance(obj, AtomicConstraint):
        for e in constraint_exprs(obj):
            _collect_vars(e, acc)
    elif isinstance(obj, (tuple, list)):
        for x in obj:
            _collect_vars(x, acc)


# ======================================================================
# Classification and orderings
# ======================================================================

def is_term(e: Expr, sig: Signature) -> bool:
    """Constructor terms: no primitive or defined function applications."""
    if isinstance(e, App):
        if sig.kind(e.symbol) != "dc":
            return False
        return all(is_term(a, sig) for a in e.args)
    return True


def is_ground(e: Expr) -> bool:
    if isinstance(e, Var):
        return False
    if isinstance(e, App):
        return all(is_ground(a) for a in e.args)
    return True


def is_total(e) -> bool:
    if isinstance(e, Bottom):
        return False
    if isinstance(e, App):
        return all(is_total(a) for a in e.args)
    if isinstance(e, AtomicConstraint):
        return all(is_total(x) for x in constraint_exprs(e))
    return True


def info_leq(e1: Expr, e2: Expr) -> bool:
    """Information ordering: bottom below everything, else structural."""
    if isinstance(e1, Bottom):
        return True
    if isinstance(e1, Var):
        return isinstance(e2, Var) and e1.name == e2.name
    if isinstance(e1, Basic):
        return isinstance(e2, Basic) and e1.value == e2.value
    if isinstance(e1, App):
        return isinstance(e2, App) and e1.symbol == e2.symbol \
            and len(e1.args) == len(e2.args) \
            and all(info_leq(a, b) for a, b in zip(e1.args, e2.args))
    return False


def constraint_info_leq(c1: AtomicConstraint, c2: AtomicConstraint) -> bool:
    return c1.symbol == c2.symbol and len(c1.args) == len(c2.args) \
        and all(info_leq(a, b) for a, b in zip(c1.args, c2.args)) \
        and info_leq(c1.result, c2.result)


def term_glb(e1: Expr, e2: Expr) -> Expr:
    """Greatest lower bound in the information ordering (always exists)."""
    if isinstance(e1, Bottom) or isinstance(e2, Bottom):
        return BOTTOM
    if isinstance(e1, Var) and isinstance(e2, Var) and e1.name == e2.name:
        return e1
    if isinstance(e1, Basic) and isinstance(e2, Basic) and e1.value == e2.value:
        return e1
    if isinstance(e1, App) and isinstance(e2, App) and e1.symbol == e2.symbol \
            and len(e1.args) == len(e2.args):
        return App(e1.symbol, tuple(term_glb(a, b) for a, b in zip(e1.args, e2.args)))
    return BOTTOM


def term_lub(e1: Expr, e2: Expr) -> Optional[Expr]:
    """Least upper bound, or None when the two conflict."""
    if isinstance(e1, Bottom):
        return e2
    if isinstance(e2, Bottom):
        return e1
    if isinstance(e1, Var) and isinstance(e2, Var) and e1.name == e2.name:
        return e1
    if isinstance(e1, Basic) and isinstance(e2, Basic) and e1.value == e2.value:
        return e1
    if isinstance(e1, App) and isinstance(e2, App) and e1.symbol == e2.symbol \
            and len(e1.args) == len(e2.args):
        parts = []
        for a, b in zip(e1.args, e2.args):
            j = term_lub(a, b)
            if j is None:
                return None
            parts.append(j)
        return App(e1.symbol, tuple(parts))
    return None


def expr_size(e: Expr) -> int:
    if isinstance(e, App):
        return 1 + sum(expr_size(a) for a in e.args)
    return 1
