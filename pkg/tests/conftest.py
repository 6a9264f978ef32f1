import pytest

from plgrader.sandbox import PrologSandbox, SandboxConfig

# --- reference/candidate programs used as goldens across the suite ---

NATALIA = """\
:- use_module(library(clpq)).

sell_clips(natalia, april, 48).

solve(Total) :-
    sell_clips(natalia, april, April),
    { May   = April / 2 },
    { Total = April + May }.
"""

BUNNIES_TURN1 = """\
:- use_module(library(clpq)).

number_of_dogs(Pets, Dogs) :-
    Dogs is 0.25 * Pets.

number_of_cats(Pets, Cats) :-
    Cats is 0.50 * Pets.

number_of_bunnies(Pets, Dogs, Cats, Bunnies) :-
    Bunnies is Pets - (Dogs + Cats).

number_of_bunnies(36, Dogs, Cats, Bunnies) :-
    number_of_dogs(36, Dogs),
    number_of_cats(36, Cats),
    number_of_bunnies(36, Dogs, Cats, Bunnies).

solve(X) :-
    number_of_bunnies(36, Dogs, Cats, Bunnies),
    {X = Bunnies}.
"""

BUNNIES_TURN2 = """\
:- use_module(library(clpq)).

solve(X) :-
    {X = 36 - (0.25 * 36 + 0.50 * 36)}.
"""

JENNY_TRY1 = """\
:- use_module(library(clpq)).

height_control_plant(36).

height_bone_meal(B) :-
    B is 1.25 * height_control_plant(36).

height_cow_manure(C) :-
    C is 2.00 * height_bone_meal(B).

solve(C) :-
    height_cow_manure(C).
"""

JENNY_TRY2 = """\
:- use_module(library(clpq)).

height_of_bone_meal_plant(Height) :-
    Height is 36 * 1.25.

height_of_cow_manure_plant(CowManureHeight) :-
    height_of_bone_meal_plant(BoneMealHeight),
    CowManureHeight is BoneMealHeight * 2.

solve(CowManureHeight) :-
    height_of_cow_manure_plant(CowManureHeight).

CowManureHeight = CowManureHeight.
"""

NON_NUMERIC = """\
:- use_module(library(clpq)).

solve(X) :-
    X = 2.00*1.25*36.
"""

HARDCODED = """\
:- use_module(library(clpq)).

solve(C) :-
    C = 10.
"""

SELF_RECURSIVE = "solve(X) :- solve(X).\n"


def completion_for(program: str, reasoning: str = "step by step") -> str:
    """Canonical strictly-formatted completion wrapping a program."""
    return (
        f"<reasoning>\n{reasoning}\n</reasoning>\n"
        f"<answer>\n{program.strip()}\n</answer>"
    )


@pytest.fixture(scope="session")
def sandbox():
    return PrologSandbox(SandboxConfig(timeout=5.0))


@pytest.fixture(scope="session")
def quick_sandbox():
    return PrologSandbox(SandboxConfig(timeout=2.0))
