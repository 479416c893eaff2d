"""Problem-description files: parse, validate, serialize.

Sectioned key = value text.  Repeated keys accumulate (lattice rows, variety
pieces, predicted components).  Unknown sections or keys are rejected with
their line number, and parse -> serialize -> parse is the identity on the
normalized key/value sequence.

    schema = 1

    [field]
    min_poly = x^2 - 2
    root = interval (1, 2)

    [space]
    mode = real
    ambient_dim = 2
    declared_dim = 1

    [lattice]
    row = (1, 0)
    row = (0, 1)

    [variety]
    branch = (t, 1/t)

    [verify]
    seed = 42
    count = 10000

Complex fields add `root = rect (re_lo, re_hi) (im_lo, im_hi)` plus `i =` and
`conj =` declarations; complex constants are polynomials in theta.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import SpecFileError, TorusflowError
from .expressions import (
    compile_numeric,
    eval_branch_coord,
    eval_scalar,
    parse_expr,
    split_vector,
    _const_rational,
)
from .flats import (
    AffinePiece,
    AffineSet,
    CurveImage,
    Flat,
    GraphPiece,
    ParametricBranch,
    PointSet,
    VarietyInput,
    embed_exact_vector,
    internal_dim,
    to_internal,
)
from .flow import FlowDescription, predicted_flow
from .lattice import Lattice, Subspace, apply_j
from .numberfield import NumberField, rationals
from .verifier import SampleConfig

Rat = Fraction

_KNOWN_SECTIONS = {"field", "space", "lattice", "variety", "flow", "verify"}
_KNOWN_KEYS = {
    "": {"schema"},
    "field": {"min_poly", "root", "i", "conj"},
    "space": {"mode", "ambient_dim", "declared_dim"},
    "lattice": {"row"},
    "variety": {"branch", "affine", "graph"},
    "flow": {"component"},
    "verify": {
        "seed",
        "count",
        "radius_min",
        "grid_eps",
        "tolerance",
        "shells",
        "coverage_threshold",
        "window",
        "curve_nodes",
        "residual_tolerance",
        "relation_digits",
    },
}


def _parse_raw(text):
    """(section, key, value, line) tuples with normalized whitespace."""
    entries = []
    section = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _KNOWN_SECTIONS:
                raise SpecFileError(f"unknown section [{section}]", lineno)
            entries.append((section, None, None, lineno))
            continue
        if "=" not in line:
            raise SpecFileError("expected key = value", lineno)
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if key not in _KNOWN_KEYS.get(section, set()):
            where = f"[{section}]" if section else "top level"
            raise SpecFileError(f"unknown key {key!r} in {where}", lineno)
        entries.append((section, key, value, lineno))
    return entries


def _entries_of(entries, section):
    return [(k, v, ln) for s, k, v, ln in entries if s == section and k]


def _single(entries, section, key, default=None, required=False):
    found = [(v, ln) for k, v, ln in _entries_of(entries, section) if k == key]
    if not found:
        if required:
            raise SpecFileError(f"missing {key!r} in [{section}]")
        return default
    if len(found) > 1:
        raise SpecFileError(f"duplicate {key!r} in [{section}]", found[1][1])
    return found[0][0]


def _rational_pair(text, what):
    parts = split_vector(text)
    if len(parts) != 2:
        raise SpecFileError(f"{what} needs two rational endpoints")
    return (_const_rational(parse_expr(parts[0])),
            _const_rational(parse_expr(parts[1])))


def _poly_coeffs(text):
    """Dense rational coefficient list (constant first) of a polynomial in x."""
    import re

    field = rationals()
    node = parse_expr(re.sub(r"\bx\b", "t", text))
    num, den = eval_branch_coord(node, field)
    if len(den.terms) != 1 or Rat(0) not in den.terms:
        raise SpecFileError("min_poly must be a polynomial in x")
    den_c = den.terms[Rat(0)].coords[0]
    coeffs = {}
    for e, c in num.terms.items():
        if e.denominator != 1 or e < 0:
            raise SpecFileError("min_poly must have nonnegative integer powers")
        coeffs[int(e)] = c.coords[0] / den_c
    if not coeffs:
        raise SpecFileError("min_poly is zero")
    out = [Rat(0)] * (max(coeffs) + 1)
    for e, c in coeffs.items():
        out[e] = c
    return out


def _build_field(entries):
    min_poly_text = _single(entries, "field", "min_poly", required=True)
    coeffs = _poly_coeffs(min_poly_text)
    root_text = _single(entries, "field", "root")
    i_text = _single(entries, "field", "i")
    conj_text = _single(entries, "field", "conj")
    root_interval = root_box = None
    if root_text:
        parts = root_text.split(None, 1)
        if parts[0] == "interval":
            root_interval = _rational_pair(parts[1], "interval")
        elif parts[0] == "rect":
            rest = parts[1].strip()
            depth, cut = 0, None
            for idx, ch in enumerate(rest):
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth == 0:
                        cut = idx + 1
                        break
            if cut is None:
                raise SpecFileError("malformed rect root selector")
            re_part = _rational_pair(rest[:cut], "rect")
            im_part = _rational_pair(rest[cut:].strip(), "rect")
            root_box = (re_part, im_part)
        else:
            raise SpecFileError("root must be 'interval (..)' or 'rect (..) (..)'")
    elif len(coeffs) > 2:
        raise SpecFileError("fields of degree > 1 need a root selector")

    i_coords = conj_coords = None
    probe = NumberField(coeffs, root_interval=root_interval, root_box=root_box)
    if i_text is not None:
        i_coords = eval_scalar(parse_expr(i_text), probe).coords
    if conj_text is not None:
        conj_coords = eval_scalar(parse_expr(conj_text), probe).coords
    if i_coords is None and conj_coords is None:
        return probe
    return NumberField(
        coeffs,
        root_interval=root_interval,
        root_box=root_box,
        i_coords=i_coords,
        conj_coords=conj_coords,
    )


def _split_top(text, sep):
    """Split on a separator character at paren depth zero."""
    parts, depth, start = [], 0, 0
    for idx, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            parts.append(text[start:idx])
            start = idx + 1
    parts.append(text[start:])
    return [p.strip() for p in parts]


def _vectors_in(text):
    """All top-level parenthesized groups in the text, with the rest ignored."""
    groups, depth, start = [], 0, None
    for idx, ch in enumerate(text):
        if ch == "(":
            if depth == 0:
                start = idx
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                groups.append(text[start : idx + 1])
    if depth != 0:
        raise SpecFileError(f"unbalanced parentheses in {text!r}")
    return groups


class _SpaceInfo:
    def __init__(self, mode, logical_dim, declared_dim):
        self.mode = mode
        self.logical_dim = logical_dim
        self.declared_dim = declared_dim
        self.internal = internal_dim(logical_dim, mode)


def _embed_logical_vector(text, space, field):
    vec = [eval_scalar(parse_expr(p), field) for p in split_vector(text)]
    if len(vec) != space.logical_dim:
        raise SpecFileError(
            f"vector {text!r} has {len(vec)} coordinates, expected "
            f"{space.logical_dim}"
        )
    return embed_exact_vector(vec, space.mode, field)


def _parse_branch(value, space, field):
    rays = None
    body = value
    if value.startswith("rays"):
        head, _, body = value.partition(":")
        ray_texts = _vectors_in(head[len("rays"):])
        if not ray_texts:
            raise SpecFileError("rays prefix lists no ray expressions")
        rays = [
            eval_scalar(parse_expr(t[1:-1]), field) for t in ray_texts
        ]
        body = body.strip()
    coords = [
        eval_branch_coord(parse_expr(p), field) for p in split_vector(body)
    ]
    if len(coords) != space.logical_dim:
        raise SpecFileError("branch coordinate count mismatch")
    if space.mode == "real":
        for num, den in coords:
            for poly in (num, den):
                for c in poly.terms.values():
                    if not c.is_real():
                        raise SpecFileError(
                            "real-mode branch has non-real coefficients"
                        )
    return ParametricBranch(coords, field, rays=rays)


def _parse_affine(value, space, field):
    if not value.startswith("point"):
        raise SpecFileError("affine piece must start with 'point (…)'")
    rest = value[len("point"):].strip()
    groups = _vectors_in(rest)
    if not groups:
        raise SpecFileError("affine piece needs a point vector")
    point = _embed_logical_vector(groups[0], space, field)
    dir_vectors = []
    tail = rest[rest.index(groups[0]) + len(groups[0]):].strip()
    use_j = space.mode == "complex"
    if tail:
        label, _, _ = tail.partition("(")
        label = label.strip()
        if label == "dirs":
            pass
        elif label == "rdirs":
            use_j = False
        elif label:
            raise SpecFileError(f"unexpected token {label!r} in affine piece")
        for g in _vectors_in(tail):
            v = _embed_logical_vector(g, space, field)
            dir_vectors.append(v)
            if use_j:
                dir_vectors.append(apply_j(v))
    sub = Subspace(space.internal, dir_vectors, field,
                   complex_structure=use_j and bool(dir_vectors))
    return AffinePiece(Flat(point, sub))


def _parse_graph(value, space, field):
    head, sep, body = value.partition(":")
    if not sep or not head.strip().startswith("vars"):
        raise SpecFileError("graph piece must look like 'vars x, y : (…)'")
    var_names = [v.strip() for v in head.strip()[len("vars"):].split(",")]
    if any(not v.isidentifier() for v in var_names):
        raise SpecFileError("bad graph variable names")
    exprs = split_vector(body.strip())
    if len(exprs) != space.logical_dim:
        raise SpecFileError("graph output count mismatch")
    compiled = [
        compile_numeric(parse_expr(e), set(var_names), field) for e in exprs
    ]

    def evaluate(vars_matrix):
        vars_matrix = np.atleast_2d(np.asarray(vars_matrix, dtype=complex))
        env = {name: vars_matrix[:, k] for k, name in enumerate(var_names)}
        cols = []
        for fn in compiled:
            val = fn(env)
            cols.append(np.broadcast_to(val, (len(vars_matrix),)).astype(complex))
        return np.stack(cols, axis=-1)

    return GraphPiece(
        nvars=len(var_names),
        evaluate=evaluate,
        complex_vars=space.mode == "complex",
    )


def _parse_span(text, space, field):
    """Entries look like r(…) (real span) or c(…) (complex: J-closed)."""
    vectors = []
    groups = []
    idx = 0
    while idx < len(text):
        ch = text[idx]
        if ch == "(":
            depth = 0
            for j in range(idx, len(text)):
                if text[j] == "(":
                    depth += 1
                elif text[j] == ")":
                    depth -= 1
                    if depth == 0:
                        break
            tag = text[:idx].strip().split()[-1] if text[:idx].strip() else ""
            groups.append((tag, text[idx : j + 1]))
            text = text[j + 1 :]
            idx = 0
            continue
        idx += 1
    for tag, group in groups:
        if tag not in ("", "r", "c"):
            raise SpecFileError(f"span entries must be r(…) or c(…), got {tag!r}")
        v = _embed_logical_vector(group, space, field)
        vectors.append(v)
        if tag == "c":
            if space.mode != "complex":
                raise SpecFileError("c(…) span entries need complex mode")
            vectors.append(apply_j(v))
    return Subspace(space.internal, vectors, field)


def _parse_component(value, space, field, lat):
    parts = _split_top(value, ";")
    base = None
    span = None
    label = ""
    for part in parts:
        if part.startswith("base"):
            base = _parse_base(part[len("base"):].strip(), space, field)
        elif part.startswith("span"):
            span = _parse_span(part[len("span"):].strip(), space, field)
        elif part.startswith("label"):
            label = part[len("label"):].strip()
        elif part:
            raise SpecFileError(f"unknown component clause {part!r}")
    if base is None or span is None:
        raise SpecFileError("component needs both 'base' and 'span' clauses")
    return base, span, label


def _parse_base(text, space, field):
    if text.startswith("point"):
        groups = _vectors_in(text[len("point"):])
        if not groups:
            raise SpecFileError("point base needs at least one vector")
        pts = [_embed_logical_vector(g, space, field) for g in groups]
        return PointSet(pts, field)
    if text.startswith("affine"):
        piece = _parse_affine(text[len("affine"):].strip(), space, field)
        return AffineSet(piece.flat)
    if text.startswith("curve"):
        rest = text[len("curve"):].strip()
        head, sep, body = rest.partition(":")
        if not sep:
            raise SpecFileError("curve base must look like 'curve u in (a,b) : (…)'")
        head_parts = head.split()
        if len(head_parts) < 3 or head_parts[1] != "in":
            raise SpecFileError("curve base must look like 'curve u in (a,b) : (…)'")
        var = head_parts[0]
        rng_text = head[head.index("in") + 2 :].strip()
        lo, hi = _rational_pair(rng_text, "curve range")
        exprs = split_vector(body.strip())
        if len(exprs) != space.logical_dim:
            raise SpecFileError("curve output count mismatch")
        compiled = [
            compile_numeric(parse_expr(e), {var}, field) for e in exprs
        ]
        mode = space.mode

        def sampler(params):
            params = np.asarray(params, dtype=float)
            env = {var: params.astype(complex)}
            cols = [
                np.broadcast_to(fn(env), params.shape).astype(complex)
                for fn in compiled
            ]
            logical = np.stack(cols, axis=-1)
            return to_internal(logical, mode)

        return CurveImage(sampler, (float(lo), float(hi)), label="curve")
    raise SpecFileError(f"unknown base descriptor {text!r}")


@dataclass
class ProblemSpec:
    """A fully built problem instance plus its normalized raw text."""

    entries: list
    schema: int
    field: NumberField
    mode: str
    logical_dim: int
    declared_dim: int
    lattice: Lattice
    variety: VarietyInput
    predicted: Optional[list]
    sample_config: SampleConfig
    path: Optional[str] = None

    def normalized_entries(self):
        """(section, key, value) triples; the round-trip invariant."""
        return [(s, k, v) for s, k, v, _ in self.entries]

    def serialize(self):
        lines = []
        top = [e for e in self.entries if e[0] == "" and e[1]]
        for _, key, value, _ in top:
            lines.append(f"{key} = {value}")
        for section, key, value, _ in self.entries:
            if section == "":
                continue
            if key is None:
                lines.append("")
                lines.append(f"[{section}]")
                continue
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def predicted_flow(self) -> Optional[FlowDescription]:
        if self.predicted is None:
            return None
        span_condition = None
        if self.mode == "complex":
            from .flow import check_span_condition

            span_condition = check_span_condition(self.lattice)
        return predicted_flow(
            self.predicted, self.lattice, self.mode, span_condition
        )


def parse_problem(text, path=None) -> ProblemSpec:
    entries = _parse_raw(text)
    schema_text = _single(entries, "", "schema", default="1")
    try:
        schema = int(schema_text)
    except ValueError:
        raise SpecFileError(f"bad schema version {schema_text!r}")
    if schema != 1:
        raise SpecFileError(f"unsupported schema version {schema}")

    field = _build_field(entries)

    mode = _single(entries, "space", "mode", default="real")
    if mode not in ("real", "complex"):
        raise SpecFileError("mode must be real or complex")
    logical_dim = int(_single(entries, "space", "ambient_dim", required=True))
    declared_dim = int(_single(entries, "space", "declared_dim", required=True))
    space = _SpaceInfo(mode, logical_dim, declared_dim)

    rows = []
    for key, value, ln in _entries_of(entries, "lattice"):
        try:
            rows.append(_embed_logical_vector(value, space, field))
        except (SpecFileError, TorusflowError) as exc:
            raise SpecFileError(f"bad lattice row: {exc}", ln)
    lattice = Lattice(space.internal, rows, field)

    pieces = []
    for key, value, ln in _entries_of(entries, "variety"):
        try:
            if key == "branch":
                pieces.append(_parse_branch(value, space, field))
            elif key == "affine":
                pieces.append(_parse_affine(value, space, field))
            elif key == "graph":
                pieces.append(_parse_graph(value, space, field))
        except (SpecFileError, TorusflowError) as exc:
            raise SpecFileError(f"bad {key} piece: {exc}", ln)
    if not pieces:
        raise SpecFileError("variety section defines no pieces")
    variety = VarietyInput(
        pieces=pieces,
        logical_dim=logical_dim,
        mode=mode,
        declared_dim=declared_dim,
        field=field,
    )

    predicted = None
    comp_entries = _entries_of(entries, "flow")
    if comp_entries:
        predicted = []
        for key, value, ln in comp_entries:
            try:
                predicted.append(_parse_component(value, space, field, lattice))
            except (SpecFileError, TorusflowError) as exc:
                raise SpecFileError(f"bad component: {exc}", ln)

    cfg_kwargs = {}
    int_keys = {"seed", "count", "shells", "curve_nodes", "relation_digits"}
    for key, value, ln in _entries_of(entries, "verify"):
        try:
            cfg_kwargs[key] = int(value) if key in int_keys else float(value)
        except ValueError:
            raise SpecFileError(f"bad numeric value for {key!r}", ln)
    sample_config = SampleConfig(**cfg_kwargs)

    return ProblemSpec(
        entries=entries,
        schema=schema,
        field=field,
        mode=mode,
        logical_dim=logical_dim,
        declared_dim=declared_dim,
        lattice=lattice,
        variety=variety,
        predicted=predicted,
        sample_config=sample_config,
        path=path,
    )


def load_problem(path) -> ProblemSpec:
    with open(path) as fh:
        text = fh.read()
    return parse_problem(text, path=path)
