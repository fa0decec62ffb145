"""Exact rational Gaussian elimination."""

from __future__ import annotations

from fractions import Fraction


class InconsistentSystemError(ArithmeticError):
    pass


class ExactSolver:
    """Reduced row echelon form of A, with the row operations recorded.

    Rows are stored sparsely.  Pivots are taken column by column, left to
    right, choosing the first remaining row with a nonzero entry; free
    unknowns are zero.  After factoring, each right-hand side costs one
    sparse transform application.
    """

    def __init__(self, matrix):
        self.n_rows = len(matrix)
        self.n_cols = len(matrix[0]) if self.n_rows else 0
        rows = [{j: Fraction(v) for j, v in enumerate(row) if v != 0} for row in matrix]
        ops = [{i: Fraction(1)} for i in range(self.n_rows)]
        pivots = []
        r = 0
        for c in range(self.n_cols):
            piv = next((i for i in range(r, self.n_rows) if c in rows[i]), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            ops[r], ops[piv] = ops[piv], ops[r]
            inv = 1 / rows[r][c]
            rows[r] = {j: v * inv for j, v in rows[r].items()}
            ops[r] = {j: v * inv for j, v in ops[r].items()}
            for i in range(self.n_rows):
                if i != r and c in rows[i]:
                    f = rows[i][c]
                    rows[i] = _axpy(rows[i], rows[r], -f)
                    ops[i] = _axpy(ops[i], ops[r], -f)
            pivots.append(c)
            r += 1
            if r == self.n_rows:
                break
        self.pivots = pivots
        self.rank = len(pivots)
        # column-wise, so a solve only touches the support of the right-hand side
        self._cols: dict[int, list[tuple[int, Fraction]]] = {}
        for i, op in enumerate(ops):
            for j, w in op.items():
                self._cols.setdefault(j, []).append((i, w))

    def solve(self, rhs):
        y = [Fraction(0)] * self.n_rows
        for j, v in enumerate(rhs):
            if v != 0:
                v = Fraction(v)
                for i, w in self._cols.get(j, ()):
                    y[i] += w * v
        for i in range(self.rank, self.n_rows):
            if y[i] != 0:
                raise InconsistentSystemError(f"row {i} reduces to 0 = {y[i]}")
        sol = [Fraction(0)] * self.n_cols
        for i, c in enumerate(self.pivots):
            sol[c] = y[i]
        return sol


def _axpy(a: dict, b: dict, f: Fraction) -> dict:
    out = dict(a)
    for j, v in b.items():
        w = out.get(j, 0) + f * v
        if w:
            out[j] = w
        else:
            out.pop(j, None)
    return out


def solve_exact(matrix, rhs):
    """Solve A c = b over the rationals; returns (solution, rank)."""
    solver = ExactSolver(matrix)
    return solver.solve(rhs), solver.rank
