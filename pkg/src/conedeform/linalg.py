"""Exact linear algebra over any field supporting +, -, *, / and == 0.

Used with `fractions.Fraction` and `GaussianRational`.  Matrices are
lists of row lists; nothing here mutates its arguments.
"""

from __future__ import annotations


def row_echelon(rows):
    """Reduced row echelon form.

    Returns (echelon_rows, pivot_columns); echelon rows are normalized to
    leading coefficient 1 and fully reduced against each other.
    """
    work = [list(r) for r in rows]
    if not work:
        return [], []
    ncols = len(work[0])
    ech = []
    pivots = []
    col = 0
    while work and col < ncols:
        pr = next((i for i, r in enumerate(work) if r[col] != 0), None)
        if pr is None:
            col += 1
            continue
        row = work.pop(pr)
        inv = row[col]
        row = [x / inv for x in row]
        for i, r in enumerate(work):
            c = r[col]
            if c != 0:
                work[i] = [x - c * y for x, y in zip(r, row)]
        work = [r for r in work if any(x != 0 for x in r)]
        # reduce earlier echelon rows
        for i, r in enumerate(ech):
            c = r[col]
            if c != 0:
                ech[i] = [x - c * y for x, y in zip(r, row)]
        ech.append(row)
        pivots.append(col)
        col += 1
    return ech, pivots


def rank(rows) -> int:
    return len(row_echelon(rows)[1])


def reduce_against(vec, ech, pivots):
    """Residual of vec after elimination by an echelon basis."""
    v = list(vec)
    for row, p in zip(ech, pivots):
        c = v[p]
        if c != 0:
            v = [x - c * y for x, y in zip(v, row)]
    return v


def solve(columns, rhs):
    """Solve sum_j x_j * columns[j] = rhs exactly.

    Returns a coefficient list or None when rhs is outside the span.
    """
    if not columns:
        return None if any(x != 0 for x in rhs) else []
    m = len(rhs)
    aug = [[col[i] for col in columns] + [rhs[i]] for i in range(m)]
    ech, pivots = row_echelon(aug)
    n = len(columns)
    if n in pivots:
        return None
    x = [rhs[0] * 0 for _ in range(n)]
    for row, p in zip(ech, pivots):
        x[p] = row[n]
    return x


def nullspace(columns):
    """Basis of {x : sum_j x_j columns[j] = 0}, one list per basis vector."""
    n = len(columns)
    if n == 0:
        return []
    m = len(columns[0])
    rows = [[col[i] for col in columns] for i in range(m)]
    ech, pivots = row_echelon(rows)
    free = [j for j in range(n) if j not in pivots]
    zero = columns[0][0] * 0
    one = zero + 1
    basis = []
    for f in free:
        v = [zero for _ in range(n)]
        v[f] = one
        for row, p in zip(ech, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis
