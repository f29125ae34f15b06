#!/usr/bin/env python3
"""Builds the 4x4 Sudoku fixture corpus.

Enumerates all 288 complete 4x4 grids, then derives:
  - tests/fixtures/sudoku4_corpus.sdk: 60 puzzles spanning blank,
    multi-solution, and unique grids (one per line, '.' for blanks)
  - tests/fixtures/sudoku4_unique5.sdk: 5 unique-solution puzzles whose
    givens can be removed one at a time for multi-solution enumeration

Deterministic: fixed seed, stable iteration order.
"""

import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "fixtures"

UNITS = []
for r in range(4):
    UNITS.append([4 * r + c for c in range(4)])
for c in range(4):
    UNITS.append([4 * r + c for r in range(4)])
for br in (0, 2):
    for bc in (0, 2):
        o = 4 * br + bc
        UNITS.append([o, o + 1, o + 4, o + 5])


def all_grids():
    grids = []
    grid = [0] * 16

    def ok(pos, val):
        for unit in UNITS:
            if pos in unit:
                for q in unit:
                    if q != pos and grid[q] == val:
                        return False
        return True

    def rec(pos):
        if pos == 16:
            grids.append(tuple(grid))
            return
        for val in (1, 2, 3, 4):
            if ok(pos, val):
                grid[pos] = val
                rec(pos + 1)
                grid[pos] = 0

    rec(0)
    return grids


GRIDS = all_grids()
assert len(GRIDS) == 288, len(GRIDS)


def count_solutions(givens, cap=300):
    n = 0
    for g in GRIDS:
        if all(g[p] == v for p, v in givens.items()):
            n += 1
            if n >= cap:
                break
    return n


def to_line(givens):
    return "".join(str(givens[p]) if p in givens else "." for p in range(16))


def dig(rng, grid, target_givens):
    """Removes cells from a complete grid while the puzzle stays unique."""
    givens = {p: grid[p] for p in range(16)}
    order = list(range(16))
    rng.shuffle(order)
    for p in order:
        if len(givens) <= target_givens:
            break
        saved = givens.pop(p)
        if count_solutions(givens, cap=2) != 1:
            givens[p] = saved
    return givens


def main():
    rng = random.Random(20240818)
    OUT.mkdir(parents=True, exist_ok=True)

    corpus = []
    seen = set()

    def add(line, comment):
        if line not in seen:
            seen.add(line)
            corpus.append((line, comment))

    # The blank grid: all 288 solutions.
    add("." * 16, "blank, 288 solutions")

    # Multi-solution puzzles: a few givens sampled from a complete grid.
    for i in range(24):
        grid = GRIDS[rng.randrange(len(GRIDS))]
        k = rng.choice((2, 3, 4, 5))
        cells = rng.sample(range(16), k)
        givens = {p: grid[p] for p in cells}
        n = count_solutions(givens)
        add(to_line(givens), f"{n} solutions")

    # Unique puzzles dug from random grids.
    uniques = []
    while len(uniques) < 35:
        grid = GRIDS[rng.randrange(len(GRIDS))]
        givens = dig(rng, grid, target_givens=rng.choice((4, 5, 6)))
        line = to_line(givens)
        if line in seen:
            continue
        assert count_solutions(givens, cap=2) == 1
        add(line, "unique")
        uniques.append((line, givens))

    with open(OUT / "sudoku4_corpus.sdk", "w") as f:
        f.write("# 4x4 grid corpus: blank, multi-solution and unique puzzles\n")
        for line, comment in corpus:
            f.write(f"{line}  # {comment}\n")

    # Five unique puzzles for given-removal enumeration; each must keep at
    # least one given so removing the first still leaves a valid puzzle.
    with open(OUT / "sudoku4_unique5.sdk", "w") as f:
        f.write("# unique-solution 4x4 puzzles\n")
        for line, givens in uniques[:5]:
            assert len(givens) >= 2
            f.write(f"{line}\n")

    print(f"corpus: {len(corpus)} puzzles, uniques: {len(uniques)}")


if __name__ == "__main__":
    main()
