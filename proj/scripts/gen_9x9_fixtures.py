#!/usr/bin/env python3
"""Generates candidate hard 9x9 Sudoku fixtures.

Digs givens out of random complete grids while the puzzle stays uniquely
solvable, aiming for low given counts. Candidates are printed to stdout;
the fixture file is assembled after timing them against the solver.

Deterministic: fixed seed.
"""

import random
import sys

ALL = (1 << 9) - 1
PEERS = []
UNIT_OF_CELL = []
for r in range(9):
    for c in range(9):
        peers = set()
        for k in range(9):
            peers.add(9 * r + k)
            peers.add(9 * k + c)
        br, bc = 3 * (r // 3), 3 * (c // 3)
        for dr in range(3):
            for dc in range(3):
                peers.add(9 * (br + dr) + (bc + dc))
        peers.discard(9 * r + c)
        PEERS.append(tuple(sorted(peers)))


def count_solutions(grid, cap):
    """Backtracking count with candidate bitmasks, stopping at cap."""
    for p, v in enumerate(grid):
        if v and any(grid[q] == v for q in PEERS[p]):
            return 0

    cands = [ALL] * 81
    assigned = [False] * 81
    for p, v in enumerate(grid):
        if v:
            cands[p] = 1 << (v - 1)
            assigned[p] = True
    for p, v in enumerate(grid):
        if v:
            bit = 1 << (v - 1)
            for q in PEERS[p]:
                if not assigned[q]:
                    cands[q] &= ~bit
                    if cands[q] == 0:
                        return 0

    count = 0

    def rec(cands):
        nonlocal count
        best, best_n = -1, 10
        for p in range(81):
            if not assigned[p]:
                n = bin(cands[p]).count("1")
                if n < best_n:
                    best, best_n = p, n
                    if n <= 1:
                        break
        if best == -1:
            count += 1
            return
        if best_n == 0:
            return
        mask = cands[best]
        assigned[best] = True
        while mask and count < cap:
            bit = mask & -mask
            mask ^= bit
            nxt = cands[:]
            nxt[best] = bit
            ok = True
            for q in PEERS[best]:
                if not assigned[q] and nxt[q] & bit:
                    nxt[q] &= ~bit
                    if nxt[q] == 0:
                        ok = False
                        break
            if ok:
                rec(nxt)
        assigned[best] = False

    rec(cands)
    return count


def complete_grid(rng):
    grid = [0] * 81

    def rec(p):
        if p == 81:
            return True
        used = set()
        for q in PEERS[p]:
            if grid[q]:
                used.add(grid[q])
        vals = [v for v in range(1, 10) if v not in used]
        rng.shuffle(vals)
        for v in vals:
            grid[p] = v
            if rec(p + 1):
                return True
        grid[p] = 0
        return False

    rec(0)
    return grid


def dig(rng, grid, floor):
    puzzle = grid[:]
    order = list(range(81))
    rng.shuffle(order)
    for p in order:
        if sum(1 for v in puzzle if v) <= floor:
            break
        saved = puzzle[p]
        puzzle[p] = 0
        if count_solutions(puzzle, cap=2) != 1:
            puzzle[p] = saved
    return puzzle


def main():
    want = int(sys.argv[1]) if len(sys.argv) > 1 else 12
    rng = random.Random(99020818)
    for i in range(want):
        grid = complete_grid(rng)
        puzzle = dig(rng, grid, floor=20)
        givens = sum(1 for v in puzzle if v)
        line = "".join(str(v) if v else "." for v in puzzle)
        print(f"{line}  # {givens} givens")


if __name__ == "__main__":
    main()
