"""Exact linear algebra over any field whose elements support +, -, *, /.

Works for fractions.Fraction and for AlgebraicNumber alike.  Every function
takes a domain object `dom` exposing `.zero` and `.one` so that empty inputs
still produce well-typed results; a NumberField is such a domain, and QQ
below covers plain rationals.

Matrices are lists of row lists; vectors are plain lists.  Nothing here is
performance-critical: problem dimensions stay in the single digits.
"""

from __future__ import annotations

from fractions import Fraction


class _RationalDomain:
    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self):
        return "QQ"


QQ = _RationalDomain()


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]

def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]

def vec_scale(u, c):
    return [a * c for a in u]

def dot(u, v):
    acc = None
    for a, b in zip(u, v):
        acc = a * b if acc is None else acc + a * b
    return acc


def rref(rows, dom):
    """Reduced row echelon form.  Returns (new_rows, pivot_columns)."""
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = dom.one / rows[r][c]
        rows[r] = vec_scale(rows[r], inv)
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                rows[i] = vec_sub(rows[i], vec_scale(rows[r], rows[i][c]))
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(rows, dom):
    return len(rref(rows, dom)[0])


def kernel_basis(rows, ncols, dom):
    """Basis of {x : M x = 0} for the matrix with the given rows."""
    red, pivots = rref(rows, dom)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [dom.zero] * ncols
        v[f] = dom.one
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def solve(rows, rhs, dom):
    """One exact solution of M x = rhs, or None if inconsistent."""
    if not rows:
        return None if any(b != 0 for b in rhs) else []
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, dom)
    for row in red:
        if all(x == 0 for x in row[:ncols]) and row[ncols] != 0:
            return None
    x = [dom.zero] * ncols
    for i, p in enumerate(pivots):
        if p == ncols:
            return None
        x[p] = red[i][ncols]
    return x


def in_span(vectors, v, dom):
    """Is v a linear combination of the vectors (exact)?"""
    if not vectors:
        return all(c == 0 for c in v)
    cols = [[vec[j] for vec in vectors] for j in range(len(v))]
    return solve(cols, list(v), dom) is not None


def span_coordinates(vectors, v, dom):
    """Coefficients expressing v over the vectors, or None."""
    if not vectors:
        return [] if all(c == 0 for c in v) else None
    cols = [[vec[j] for vec in vectors] for j in range(len(v))]
    return solve(cols, list(v), dom)


def canonical_basis(vectors, dom):
    """RREF basis: a canonical form for the span (equal spans compare equal)."""
    red, _ = rref(vectors, dom)
    return red


def spans_equal(a, b, dom):
    return canonical_basis(a, dom) == canonical_basis(b, dom)


def span_contains(big, small, dom):
    """Does span(big) contain span(small)?"""
    return all(in_span(big, v, dom) for v in small)


def sum_span(a, b, dom):
    return canonical_basis(list(a) + list(b), dom)


def intersect_spans(a, b, ambient_dim, dom):
    """Basis of span(a) intersected with span(b)."""
    if not a or not b:
        return []
    # solutions of sum_i s_i a_i - sum_j t_j b_j = 0
    rows = []
    for coord in range(ambient_dim):
        rows.append([u[coord] for u in a] + [-v[coord] for v in b])
    combos = kernel_basis(rows, len(a) + len(b), dom)
    out = []
    for combo in combos:
        vec = [dom.zero] * ambient_dim
        for s, u in zip(combo[: len(a)], a):
            vec = vec_add(vec, vec_scale(u, s))
        out.append(vec)
    return canonical_basis(out, dom)


def orthogonal_complement(vectors, ambient_dim, dom):
    """Basis of {x : <x, v> = 0 for all v} under the standard bilinear form."""
    if not vectors:
        red, _ = rref([[dom.one if i == j else dom.zero for j in range(ambient_dim)]
                       for i in range(ambient_dim)], dom)
        return red
    return kernel_basis([list(v) for v in vectors], ambient_dim, dom)


def project_onto_span(x, vectors, dom):
    """Orthogonal projection of x onto span(vectors), exactly."""
    if not vectors:
        return [dom.zero] * len(x)
    gram = [[dot(u, v) for v in vectors] for u in vectors]
    rhs = [dot(u, x) for u in vectors]
    coeffs = solve(gram, rhs, dom)
    out = [dom.zero] * len(x)
    for c, v in zip(coeffs, vectors):
        out = vec_add(out, vec_scale(v, c))
    return out


def project_onto_complement(x, vectors, dom):
    """x minus its orthogonal projection onto span(vectors)."""
    return vec_sub(list(x), project_onto_span(x, vectors, dom))
