"""Problem records: compiled-in fixtures and JSON dataset loading.

Every fixture carries a frozen gold answer and a hand-written reference
logic program; the test suite certifies both against the independent
oracles before they are trusted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import DuplicateId, SchemaError

CATEGORIES = ("math_word", "constraint_satisfaction",
              "algorithmic_instructions", "navigate", "external")


@dataclass(frozen=True)
class ProblemRecord:
    id: str
    category: str
    statement: str
    gold: object
    entry: str = "problem(Answer)"
    entanglement: int = 0
    reference_program: str | None = None


_FOUR_DIGIT_PROGRAM = """\
problem(Number) :-
    A #>= 1, A #=< 9,
    B #>= 0, B #=< 9,
    C #>= 0, C #=< 9,
    D #>= 0, D #=< 9,
    A + B + C + D #= 20,
    A #= B + 1,
    B #= C + 6,
    C #= D + 1,
    Number #= A * 1000 + B * 100 + C * 10 + D,
    label([A, B, C, D]).
"""

_BIRDS_PROGRAM = """\
problem(Total) :-
    {TreeA + 3 = 2 * (TreeB - 3)},
    {TreeB + 2 = (TreeA - 2) + 1},
    {Total = TreeA + TreeB}.
"""

_AGE_PROGRAM = """\
problem(MyAge) :-
    {Father = 30 + MyAge / 2},
    {Mother = 25 + 2 * MyAge / 3},
    {Sister = 7 + 5 * MyAge / 6},
    {MyAge + Father + Mother + Sister = 116}.
"""

_LINE_PROGRAM = """\
problem(Alex) :-
    Bob #= 7,
    Alex #>= 1, Alex #=< 12,
    Chad #>= 1, Chad #=< 12,
    Frank #>= 1, Frank #=< 12,
    Sam #>= 1, Sam #=< 12,
    abs(Bob - Alex) #= 5,
    Chad #= Bob + 1,
    Frank #= Alex + 1,
    Sam #= Bob - 1,
    abs(Sam - Frank) #= 3,
    all_different([Bob, Alex, Chad, Frank, Sam]),
    label([Alex, Chad, Frank, Sam]).
"""

_CINEMA_PROGRAM = """\
problem(Total) :-
    fill(0, [seat(1, 2)], Seats),
    length(Seats, Total).

fill(12, Seats, Seats).
fill(I, Seats0, Seats) :-
    I < 12,
    Row is I // 4 + 1,
    Col is I mod 4 + 1,
    ( member(seat(Row, Col), Seats0) -> Seats1 = Seats0
    ; blocked(Row, Col, Seats0) -> Seats1 = Seats0
    ; Seats1 = [seat(Row, Col) | Seats0]
    ),
    I1 is I + 1,
    fill(I1, Seats1, Seats).

blocked(Row, Col, Seats) :-
    ( R1 is Row - 1, member(seat(R1, Col), Seats)
    ; R2 is Row + 1, member(seat(R2, Col), Seats)
    ; C1 is Col - 1, member(seat(Row, C1), Seats)
    ; C2 is Col + 1, member(seat(Row, C2), Seats)
    ).
"""

_SUM_PLAIN_PROGRAM = """\
problem(Sum) :-
    play([1, -2, 3, 0, 4, 0, -1, -1, 0, 0], [7, 3, -4, -2], Final),
    total(Final, Sum).

play(Squares, [], Squares).
play(Squares0, [W | Ws], Squares) :-
    put(Squares0, W, Squares1),
    play(Squares1, Ws, Squares).

put([0 | T], W, [W | T]) :- !.
put([H | T], W, [H | T1]) :- put(T, W, T1).

total([], 0).
total([H | T], S) :- total(T, S0), S is S0 + H.
"""

_SUM_PREV_PROGRAM = """\
problem(Sum) :-
    play([1, -2, 3, 0, 4, 0, -1, -1, 0, 0], [3, -2, 4, -1], Final),
    total(Final, Sum).

play(Squares, [], Squares).
play(Squares0, [W | Ws], Squares) :-
    put(Squares0, W, Squares1),
    play(Squares1, Ws, Squares).

put([0 | T], W, [W | T]) :- !.
put([Before, 0 | T], W, Out) :- !,
    ( Before =:= W -> Out = [Before, 0 | T]
    ; Out = [Before, W | T]
    ).
put([H | T], W, [H | T1]) :- put(T, W, T1).

total([], 0).
total([H | T], S) :- total(T, S0), S is S0 + H.
"""

_SUM_NEIGHBOR_PROGRAM = """\
problem(Sum) :-
    play([1, -2, 3, 0, 4, 0, -1, -1, 0, 0], [7, 3, -4, -4, 3], Final),
    total(Final, Sum).

play(Squares, [], Squares).
play(Squares0, [W | Ws], Squares) :-
    put(Squares0, W, Squares1),
    play(Squares1, Ws, Squares).

put([0 | T], W, [W | T]) :- !.
put([Before, 0, After | T], W, Out) :- !,
    ( W =:= Before + After -> Out = [0, 0, 0 | T]
    ; Out = [Before, W, After | T]
    ).
put([Before, 0], W, [Before, W]) :- !.
put([H | T], W, [H | T1]) :- put(T, W, T1).

total([], 0).
total([H | T], S) :- total(T, S0), S is S0 + H.
"""

_SUM_RULES_TEXT = (
    "Sum It Up is played on a strip of ten squares that starts as "
    "[1, -2, 3, 0, 4, 0, -1, -1, 0, 0]. The numbers on the waitlist "
    "{waitlist} are played in order, and each played number goes into "
    "the leftmost square that holds a 0.{extra} When the waitlist is "
    "empty the score is the sum of every square. What is the final "
    "score?")

FIXTURES = (
    ProblemRecord(
        id="four-digit-number",
        category="constraint_satisfaction",
        statement=(
            "Find the four-digit number whose digits sum to 20, where the "
            "thousands digit is one more than the hundreds digit, the "
            "hundreds digit is six more than the tens digit, and the tens "
            "digit is one more than the units digit."),
        gold=9821,
        entry="problem(Number)",
        entanglement=4,
        reference_program=_FOUR_DIGIT_PROGRAM,
    ),
    ProblemRecord(
        id="birds-two-trees",
        category="math_word",
        statement=(
            "Two flocks of birds sit in two trees. If three birds fly from "
            "the second tree to the first, the first tree will have twice "
            "as many birds as the second. If instead two birds fly from "
            "the first tree to the second, the second tree will have one "
            "more bird than the first. How many birds are there in total?"),
        gold=27,
        entry="problem(Total)",
        entanglement=2,
        reference_program=_BIRDS_PROGRAM,
    ),
    ProblemRecord(
        id="age-sum-116",
        category="math_word",
        statement=(
            "When you add my age to the ages of my father, my mother, and "
            "my sister, you get 116. My father is 30 years older than half "
            "my age. My mother is 25 years older than two thirds of my "
            "age. My sister is 7 years older than five sixths of my age. "
            "How old am I?"),
        gold=18,
        entry="problem(MyAge)",
        entanglement=4,
        reference_program=_AGE_PROGRAM,
    ),
    ProblemRecord(
        id="line-of-twelve",
        category="constraint_satisfaction",
        statement=(
            "Twelve people stand in a line at positions 1 through 12. Bob "
            "stands at position 7. Four people stand between Bob and Alex. "
            "Chad stands directly behind Bob, Frank stands directly behind "
            "Alex, and Sam stands directly in front of Bob. Two people "
            "stand between Sam and Frank, and no two of the five stand at "
            "the same position. At which position does Alex stand?"),
        gold=2,
        entry="problem(Alex)",
        entanglement=5,
        reference_program=_LINE_PROGRAM,
    ),
    ProblemRecord(
        id="cinema-3x4",
        category="algorithmic_instructions",
        statement=(
            "A cinema hall has 3 rows of 4 seats each, and the second seat "
            "of the first row is already taken. People arrive one at a "
            "time. Each person scans the seats row by row from row 1 seat "
            "1 and sits in the first free seat that has no occupied seat "
            "directly to its left, right, front, or back; a person who "
            "finds no such seat leaves. After arrivals stop changing "
            "anything, how many people are seated in total?"),
        gold=6,
        entry="problem(Total)",
        entanglement=5,
        reference_program=_CINEMA_PROGRAM,
    ),
    ProblemRecord(
        id="sum-it-up-plain",
        category="algorithmic_instructions",
        statement=_SUM_RULES_TEXT.format(waitlist="[7, 3, -4, -2]",
                                         extra=""),
        gold=8,
        entry="problem(Sum)",
        entanglement=0,
        reference_program=_SUM_PLAIN_PROGRAM,
    ),
    ProblemRecord(
        id="sum-it-up-prev-equal",
        category="algorithmic_instructions",
        statement=_SUM_RULES_TEXT.format(
            waitlist="[3, -2, 4, -1]",
            extra=(" However, if the number in the square before the 0 "
                   "square equals the played number, the played number is "
                   "discarded and the 0 stays.")),
        gold=1,
        entry="problem(Sum)",
        entanglement=2,
        reference_program=_SUM_PREV_PROGRAM,
    ),
    ProblemRecord(
        id="sum-it-up-neighbor-sum",
        category="algorithmic_instructions",
        statement=_SUM_RULES_TEXT.format(
            waitlist="[7, 3, -4, -4, 3]",
            extra=(" However, if the played number equals the sum of the "
                   "numbers in the squares before and after the 0 square, "
                   "all three of those squares become 0.")),
        gold=-3,
        entry="problem(Sum)",
        entanglement=3,
        reference_program=_SUM_NEIGHBOR_PROGRAM,
    ),
)

_STATEMENT_KEYS = ("statement", "question", "problem")
_GOLD_KEYS = ("gold", "answer", "label")


def _coerce_record(raw, index):
    if not isinstance(raw, dict):
        raise SchemaError(f"record {index} is not an object")
    pid = raw.get("id")
    if not isinstance(pid, str) or not pid:
        raise SchemaError(f"record {index} needs a non-empty string id")
    statement = next((raw[k] for k in _STATEMENT_KEYS if k in raw), None)
    if not isinstance(statement, str) or not statement:
        raise SchemaError(f"record {pid!r} needs a statement")
    gold = next((raw[k] for k in _GOLD_KEYS if k in raw), None)
    if isinstance(gold, bool) or not isinstance(gold, (int, float)):
        raise SchemaError(f"record {pid!r} needs a numeric gold answer")
    category = raw.get("category", "external")
    if category not in CATEGORIES:
        raise SchemaError(f"record {pid!r} has unknown category "
                          f"{category!r}")
    entanglement = raw.get("entanglement", 0)
    if not isinstance(entanglement, int) or entanglement < 0:
        raise SchemaError(f"record {pid!r} entanglement must be a "
                          "nonnegative integer")
    entry = raw.get("entry", "problem(Answer)")
    if not isinstance(entry, str) or "(" not in entry:
        raise SchemaError(f"record {pid!r} entry must be a query term")
    return ProblemRecord(id=pid, category=category, statement=statement,
                         gold=gold, entry=entry, entanglement=entanglement,
                         reference_program=raw.get("reference_program"))


def load_problems(path=None, include_fixtures=True):
    """Problem records from a JSON file merged with the fixtures.

    The file holds a list of objects with id, statement, gold answer,
    and optional category/entanglement/entry fields.  Duplicate ids,
    within the file or against the fixtures, are an error.
    """
    problems = list(FIXTURES) if include_fixtures else []
    seen = {p.id for p in problems}
    if path is not None:
        with open(Path(path), encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON in {path}: {exc}") from exc
        if isinstance(data, dict) and "problems" in data:
            data = data["problems"]
        if not isinstance(data, list):
            raise SchemaError("dataset must be a list of problem objects")
        for index, raw in enumerate(data):
            record = _coerce_record(raw, index)
            if record.id in seen:
                raise DuplicateId(f"duplicate problem id {record.id!r}")
            seen.add(record.id)
            problems.append(record)
    return problems
