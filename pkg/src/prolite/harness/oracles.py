"""Independent answer oracles for the evaluation problem families.

Each oracle recomputes the expected answer from first principles with
plain Python, sharing no code with the constraint solvers, so it can
certify the gold labels and cross-check solver output.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from ..errors import (Inconsistent, NoZeroSquare, SearchSpaceTooLarge,
                      Singular)

BRUTE_FORCE_CAP = 10_000_000


def csp_brute_oracle(domains, predicate):
    """All tuples from the cartesian product of domains satisfying
    predicate, by exhaustive enumeration."""
    size = 1
    for dom in domains:
        size *= len(dom)
        if size > BRUTE_FORCE_CAP:
            raise SearchSpaceTooLarge(
                f"product of domain sizes exceeds {BRUTE_FORCE_CAP}")
    return [combo for combo in itertools.product(*domains)
            if predicate(*combo)]


def linear_gold_oracle(coefficients, constants):
    """Solve the square linear system A x = b exactly over the rationals
    with textbook Gaussian elimination and back-substitution."""
    n = len(coefficients)
    if any(len(row) != n for row in coefficients) or len(constants) != n:
        raise ValueError("need a square system with matching constants")
    a = [[Fraction(v) for v in row] for row in coefficients]
    b = [Fraction(v) for v in constants]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            if any(b[r] != 0 and all(a[r][c] == 0 for c in range(n))
                   for r in range(col, n)):
                raise Inconsistent("no solution")
            raise Singular("system does not determine a unique solution")
        a[col], a[pivot] = a[pivot], a[col]
        b[col], b[pivot] = b[pivot], b[col]
        for r in range(col + 1, n):
            factor = a[r][col] / a[col][col]
            if factor == 0:
                continue
            for c in range(col, n):
                a[r][c] -= factor * a[col][c]
            b[r] -= factor * b[col]
    xs = [Fraction(0)] * n
    for row in range(n - 1, -1, -1):
        acc = b[row] - sum(a[row][c] * xs[c] for c in range(row + 1, n))
        xs[row] = acc / a[row][row]
    return xs


def cinema_oracle(rows, cols, pre_seated, order="row-major"):
    """Count how many people end up seated when arrivals take the next
    free seat (in the given scan order) that has no orthogonally
    adjacent occupied seat, pre-seated people included in the count."""
    occupied = set()
    for row, col in pre_seated:
        if not (1 <= row <= rows and 1 <= col <= cols):
            raise ValueError(f"pre-seated ({row},{col}) outside the grid")
        occupied.add((row, col))
    if order == "row-major":
        scan = [(r, c) for r in range(1, rows + 1)
                for c in range(1, cols + 1)]
    elif order == "column-major":
        scan = [(r, c) for c in range(1, cols + 1)
                for r in range(1, rows + 1)]
    else:
        raise ValueError(f"unknown scan order {order!r}")
    for row, col in scan:
        if (row, col) in occupied:
            continue
        neighbours = [(row - 1, col), (row + 1, col),
                      (row, col - 1), (row, col + 1)]
        if any(n in occupied for n in neighbours):
            continue
        occupied.add((row, col))
    return len(occupied)


SUM_IT_UP_RULES = ("plain", "prev_equal_clears", "neighbor_sum_zeroes")


def sum_it_up_oracle(squares, waitlist, rule="plain"):
    """Final sum of the squares after the waitlist is played out.

    Each waitlist number targets the leftmost 0 square.  Under "plain"
    it simply fills it.  Under "prev_equal_clears" the number is
    discarded (the 0 stays) when the square before the 0 holds an equal
    number.  Under "neighbor_sum_zeroes" all three squares become 0
    when the number equals the sum of the squares before and after the
    0; special rules needing a missing neighbour fall back to a plain
    fill.
    """
    if rule not in SUM_IT_UP_RULES:
        raise ValueError(f"unknown rule {rule!r}")
    board = list(squares)
    for number in waitlist:
        try:
            i = board.index(0)
        except ValueError:
            raise NoZeroSquare(
                f"no 0 square left for waitlist number {number}") from None
        if rule == "prev_equal_clears" and i > 0 and board[i - 1] == number:
            continue
        if (rule == "neighbor_sum_zeroes" and 0 < i < len(board) - 1
                and board[i - 1] + board[i + 1] == number):
            board[i - 1] = board[i] = board[i + 1] = 0
            continue
        board[i] = number
    return sum(board)
