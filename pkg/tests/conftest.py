import random
from pathlib import Path

import pytest

from qcflp.syntax import Program, ProgramRule, parse_program
from qcflp.terms import App, AtomicConstraint, TRUE

ROOT = Path(__file__).resolve().parent.parent
LIBRARY = ROOT / "programs" / "library.qcflp"

BOOK4 = ('book(4, "Beim Hauten der Zwiebel", "Gunter Grass", "German", '
         '"Biography", medium, 432)')
BOOK2 = 'book(2, "Dune", "F. P. Herbert", "English", "SciFi", medium, 345)'


@pytest.fixture(scope="session")
def library_text():
    return LIBRARY.read_text()


@pytest.fixture(scope="session")
def library(library_text):
    return parse_program(library_text)


def random_layered_program(rng: random.Random, layers: int = 3,
                           per_layer: int = 2) -> Program:
    """A terminating program: each function calls only earlier layers.

    Rules are nullary facts or unary projections with attenuation factors
    drawn from a small palette, plus occasional conditions on earlier
    functions, so answer enumeration is finite and qualifications vary.
    """
    palette = [1.0, 0.9, 0.8, 0.75, 0.5]
    values = [App("tt"), App("ff"), App("mk", (App("tt"),))]
    rules = []
    names = []
    for layer in range(layers):
        for j in range(per_layer):
            name = f"f{layer}_{j}"
            for _ in range(rng.randint(1, 2)):
                alpha = rng.choice(palette)
                if layer == 0 or rng.random() < 0.3:
                    rhs = rng.choice(values)
                    conds = ()
                else:
                    callee = rng.choice([n for n in names])
                    rhs = App(callee)
                    conds = ()
                    if rng.random() < 0.5:
                        other = rng.choice(names)
                        conds = (AtomicConstraint(
                            "==", (App(other), rng.choice(values)), TRUE),)
                rules.append(ProgramRule(name, (), alpha, rhs, conds))
            names.append(name)
    text = "\n".join(_rule_text(r) for r in rules)
    return parse_program(text)


def _rule_text(r: ProgramRule) -> str:
    from qcflp.syntax import print_rule
    return print_rule(r)
