"""Affine flats, flat families, and the supported variety input classes.

Logical coordinates are the n coordinates the user writes; internally a
complex problem lives in R^(2n) with interleaved (Re, Im) pairs.  Exact
objects (flats, subspaces, coefficient vectors) are always stored in internal
coordinates with real-valued field entries; numeric samplers convert between
the two pictures with to_internal/to_logical.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import exactlinalg as xl
from .errors import NotContained, TorusflowError
from .lattice import Subspace
from .numberfield import NumberField

Rat = Fraction


# ---------------------------------------------------------------------------
# Coordinate conversions between logical and internal pictures
# ---------------------------------------------------------------------------


def to_internal(points, mode):
    """Complex (m, n) samples -> real (m, N) internal coordinates."""
    pts = np.atleast_2d(np.asarray(points))
    if mode == "real":
        return np.ascontiguousarray(pts.real.astype(float))
    m, n = pts.shape
    out = np.empty((m, 2 * n), dtype=float)
    out[:, 0::2] = pts.real
    out[:, 1::2] = pts.imag
    return out


def to_logical(points, mode):
    """Real (m, N) internal coordinates -> complex (m, n) logical samples."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if mode == "real":
        return pts.astype(complex)
    return pts[:, 0::2] + 1j * pts[:, 1::2]


def embed_exact_vector(vec, mode, field: NumberField):
    """Logical K-vector -> internal vector with real field entries."""
    elems = [field.element(x) for x in vec]
    if mode == "real":
        for e in elems:
            if not e.is_real():
                raise TorusflowError("real-mode coordinates must be real values")
        return elems
    out = []
    for e in elems:
        out.append(e.real_part())
        out.append(e.imag_part())
    return out


def internal_dim(logical_dim, mode):
    return logical_dim if mode == "real" else 2 * logical_dim


# ---------------------------------------------------------------------------
# Fractional-exponent polynomials in one variable over the field
# ---------------------------------------------------------------------------


class TPoly:
    """Finite sum of c * t^e with exact coefficients and rational exponents."""

    __slots__ = ("terms", "field")

    def __init__(self, field: NumberField, terms=None):
        self.field = field
        self.terms = {}
        if terms:
            for e, c in dict(terms).items():
                c = field.element(c)
                if not c.is_zero():
                    self.terms[Rat(e)] = c

    @staticmethod
    def constant(field, value):
        return TPoly(field, {Rat(0): value})

    @staticmethod
    def variable(field):
        return TPoly(field, {Rat(1): field.one})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, self.field.zero) + c
            if s.is_zero():
                out.pop(e, None)
            else:
                out[e] = s
        return TPoly(self.field, out)

    def __neg__(self):
        return TPoly(self.field, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                s = out.get(e, self.field.zero) + c1 * c2
                if s.is_zero():
                    out.pop(e, None)
                else:
                    out[e] = s
        return TPoly(self.field, out)

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise TorusflowError("t-polynomial powers must be nonnegative integers")
        result = TPoly.constant(self.field, self.field.one)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exponent_denominator(self):
        d = 1
        for e in self.terms:
            d = d * e.denominator // __import__("math").gcd(d, e.denominator)
        return d

    def max_exponent(self):
        return max(self.terms) if self.terms else None

    def eval_numeric(self, t):
        """Evaluate at positive real (or complex, if exponents integral) t."""
        t = np.asarray(t)
        acc = np.zeros(t.shape, dtype=complex)
        for e, c in self.terms.items():
            acc = acc + c.to_complex() * t ** float(e)
        return acc

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = [f"({c})*t^{e}" for e, c in sorted(self.terms.items(), reverse=True)]
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Flats
# ---------------------------------------------------------------------------


class Flat:
    """Affine flat base_point + directions, stored canonically.

    The base point is the orthogonal projection of the given point onto the
    complement of the direction space, so equal point sets get equal
    representations.
    """

    def __init__(self, point, directions: Subspace):
        self.directions = directions
        field = directions.field
        pt = [field.element(x) for x in point]
        if len(pt) != directions.ambient_dim:
            raise TorusflowError("flat point has wrong length")
        self.base_point = xl.project_onto_complement(pt, directions.basis, field)
        self.field = field

    @property
    def ambient_dim(self):
        return self.directions.ambient_dim

    @property
    def dim(self):
        return self.directions.dim

    def key(self):
        return (
            self.directions.key(),
            tuple(tuple(e.coords) for e in self.base_point),
        )

    def __eq__(self, other):
        if not isinstance(other, Flat):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def contains_point(self, point):
        field = self.field
        diff = xl.vec_sub([field.element(x) for x in point], self.base_point)
        return self.directions.contains_vector(diff)

    def float_base(self):
        return np.array([e.to_float() for e in self.base_point], dtype=float)

    def __repr__(self):
        return f"Flat(dim={self.dim} in R^{self.ambient_dim})"


def linear_part(A: Flat) -> Subspace:
    """The direction subspace of a flat."""
    return A.directions


def perp_base_point(A: Flat, span: Subspace):
    """Unique point of (A + span) intersected with span-perp, exactly.

    Requires the flat's linear part to lie inside span.
    """
    if not span.contains(A.directions):
        raise NotContained("flat's linear part is not inside the given span")
    return xl.project_onto_complement(A.base_point, span.basis, span.field)


# ---------------------------------------------------------------------------
# Base-set descriptors (the C pieces of flow components)
# ---------------------------------------------------------------------------


class PointSet:
    """Finite set of exact points."""

    kind = "points"

    def __init__(self, points, field: NumberField):
        self.field = field
        self.points = [[field.element(x) for x in p] for p in points]
        self.points.sort(key=lambda p: tuple(tuple(e.coords) for e in p))

    @property
    def dim(self):
        return 0

    def float_points(self):
        return np.array(
            [[e.to_float() for e in p] for p in self.points], dtype=float
        )

    def sample_nodes(self, count, window):
        return self.float_points()

    def project(self, span: Subspace):
        pts = [
            xl.project_onto_complement(p, span.basis, span.field)
            for p in self.points
        ]
        return PointSet(pts, self.field)

    def describe(self):
        return {
            "kind": self.kind,
            "points": [[repr(e) for e in p] for p in self.points],
        }


class AffineSet:
    """An affine flat used as a base set."""

    kind = "affine"

    def __init__(self, flat: Flat):
        self.flat = flat

    @property
    def dim(self):
        return self.flat.dim

    def sample_nodes(self, count, window):
        base = self.flat.float_base()
        dirs = self.flat.directions.float_basis()
        b = len(dirs)
        if b == 0:
            return base[None, :]
        per_axis = max(2, int(np.ceil(count ** (1.0 / b))))
        axes = [np.linspace(-window, window, per_axis) for _ in range(b)]
        mesh = np.meshgrid(*axes, indexing="ij")
        coeffs = np.stack([g.ravel() for g in mesh], axis=1)
        return base[None, :] + coeffs @ dirs

    def project(self, span: Subspace):
        field = span.field
        new_point = xl.project_onto_complement(
            self.flat.base_point, span.basis, field
        )
        new_dirs = [
            xl.project_onto_complement(v, span.basis, field)
            for v in self.flat.directions.basis
        ]
        sub = Subspace(span.ambient_dim, new_dirs, field)
        return AffineSet(Flat(new_point, sub))

    def describe(self):
        return {
            "kind": self.kind,
            "point": [repr(e) for e in self.flat.base_point],
            "directions": [
                [repr(e) for e in v] for v in self.flat.directions.basis
            ],
        }


class CurveImage:
    """Numeric curve base: a parametric sampler into internal coordinates."""

    kind = "curve"

    def __init__(self, sampler: Callable, param_range, label="curve",
                 projection=None):
        self.sampler = sampler
        self.param_range = (float(param_range[0]), float(param_range[1]))
        self.label = label
        self.projection = projection  # optional (matrix) applied to samples

    @property
    def dim(self):
        return 1

    def sample_nodes(self, count, window):
        lo, hi = self.param_range
        params = np.linspace(lo, hi, int(count))
        pts = np.atleast_2d(np.asarray(self.sampler(params), dtype=float))
        if self.projection is not None:
            pts = pts @ self.projection.T
        return pts

    def sample_at(self, params):
        pts = np.atleast_2d(np.asarray(self.sampler(np.asarray(params)), dtype=float))
        if self.projection is not None:
            pts = pts @ self.projection.T
        return pts

    def project(self, span: Subspace):
        basis = span.float_basis()
        n = span.ambient_dim
        proj = np.eye(n)
        if len(basis):
            # numeric orthogonal projection onto the complement of span
            q, _ = np.linalg.qr(basis.T)
            proj = np.eye(n) - q @ q.T
        if self.projection is not None:
            proj = proj @ self.projection
        return CurveImage(self.sampler, self.param_range, self.label, proj)

    def describe(self):
        return {
            "kind": self.kind,
            "label": self.label,
            "param_range": list(self.param_range),
        }


# ---------------------------------------------------------------------------
# Flat families
# ---------------------------------------------------------------------------


class FiniteFlatSet:
    """A finite collection of flats, deduplicated by canonical form."""

    kind = "finite"

    def __init__(self, flats):
        seen = {}
        for f in flats:
            seen[f.key()] = f
        self.flats = [seen[k] for k in sorted(seen)]

    def linear_span(self) -> Subspace:
        if not self.flats:
            raise TorusflowError("empty flat family has no linear span")
        field = self.flats[0].field
        vecs = []
        for f in self.flats:
            vecs.extend(f.directions.basis)
        return Subspace(self.flats[0].ambient_dim, vecs, field)

    def __len__(self):
        return len(self.flats)


class TranslateFamily:
    """Flats with one fixed direction space, translated over a base set.

    Every member has the same linear part, so the neatness condition (open
    subfamilies span what the family spans) holds by construction.
    """

    kind = "translate"

    def __init__(self, base, direction: Subspace):
        self.base = base
        self.direction = direction

    def linear_span(self) -> Subspace:
        return self.direction


def family_linear_span(family) -> Subspace:
    """Smallest subspace containing the linear part of every member flat."""
    return family.linear_span()


# ---------------------------------------------------------------------------
# Variety input
# ---------------------------------------------------------------------------


class ParametricBranch:
    """One curve branch with exact rational-function (or power-sum) coordinates.

    Each logical coordinate is a pair (numerator, denominator) of TPoly; the
    branch is followed along real t -> +infinity, or along declared unit rays
    for complex problems (integer exponents only in that case).
    """

    kind = "branch"

    def __init__(self, coords, field: NumberField, rays=None, label="branch"):
        self.field = field
        self.coords = []
        for pair in coords:
            num, den = pair
            if not isinstance(num, TPoly):
                num = TPoly(field, num)
            if not isinstance(den, TPoly):
                den = TPoly(field, den)
            if den.is_zero():
                raise TorusflowError("branch denominator is identically zero")
            self.coords.append((num, den))
        self.rays = None
        if rays is not None:
            self.rays = [field.element(r) for r in rays]
            for num, den in self.coords:
                for poly in (num, den):
                    if poly.exponent_denominator() != 1:
                        raise TorusflowError(
                            "complex branches with rays need integer exponents"
                        )
        self.label = label

    @property
    def intrinsic_dim(self):
        return 1

    def evaluate(self, t):
        """Numeric logical coordinates at parameter values t (positive reals)."""
        t = np.asarray(t, dtype=complex)
        cols = []
        for num, den in self.coords:
            cols.append(num.eval_numeric(t) / den.eval_numeric(t))
        return np.stack(cols, axis=-1)


class AffinePiece:
    """An affine flat in internal coordinates, as a piece of the variety."""

    kind = "affine"

    def __init__(self, flat: Flat, logical_dim=None):
        self.flat = flat
        self.logical_dim = logical_dim

    @property
    def intrinsic_dim(self):
        return self.flat.dim


class GraphPiece:
    """Numeric-only graph of a polynomial map; never analyzed symbolically."""

    kind = "graph"

    def __init__(self, nvars, evaluate: Callable, label="graph", complex_vars=True):
        self.nvars = nvars
        self.evaluate = evaluate
        self.label = label
        self.complex_vars = complex_vars

    @property
    def intrinsic_dim(self):
        return self.nvars


@dataclass
class VarietyInput:
    """The variety X as a finite union of supported pieces."""

    pieces: list
    logical_dim: int
    mode: str
    declared_dim: int
    field: NumberField

    def __post_init__(self):
        if self.mode not in ("real", "complex"):
            raise TorusflowError("mode must be 'real' or 'complex'")
        for piece in self.pieces:
            intrinsic = piece.intrinsic_dim
            if piece.kind == "affine" and self.mode == "complex":
                intrinsic = (intrinsic + 1) // 2
            if intrinsic > self.declared_dim:
                raise TorusflowError(
                    "declared_dim is smaller than a piece's intrinsic dimension"
                )

    @property
    def internal_dim(self):
        return internal_dim(self.logical_dim, self.mode)

    @property
    def symbolic_only(self):
        return all(p.kind in ("branch", "affine") for p in self.pieces)
