"""Assembly of the limit set: neat grouping, torus closures, base sets.

The limit set of the projected variety decomposes as a finite union of
pieces pi(C) + T, where T is the compact torus closure of the span V of a
neat family of asymptotic flats and C collects the family's base points in
the orthogonal complement.  When the smallest Lambda-rational subspace W
strictly contains V, base points are re-projected into the complement of W
so each component is presented canonically; both V and W are recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional

from . import exactlinalg as xl
from .errors import InternalInvariantError, TorusflowError
from .flats import (
    AffineSet,
    CurveImage,
    FiniteFlatSet,
    PointSet,
    TranslateFamily,
    VarietyInput,
    perp_base_point,
)
from .lattice import (
    ClosedSubgroupDescriptor,
    Lattice,
    Subspace,
    is_j_stable,
    torus_closure,
)
from .asymptotics import variety_asymptotic_flats

COMPLEX_THEOREM = "complex_theorem_applies"
REAL_ONLY = "real_only"


def check_span_condition(lat: Lattice) -> str:
    """Whether the real span of the lattice is closed under multiplication by i.

    If it is not, the complex statement does not apply and the engine demotes
    the problem to the real one on R^(2n); the report records the verdict.
    """
    if lat.ambient_dim % 2:
        raise TorusflowError("span condition only makes sense in complex mode")
    return COMPLEX_THEOREM if is_j_stable(lat.span) else REAL_ONLY


def group_neat(families):
    """Split families until each is neat: constant direction, connected base.

    Finite sets split into singletons; translate families over affine or
    curve bases are already connected; point-set bases split per point.
    """
    out = []
    for fam in families:
        if isinstance(fam, FiniteFlatSet):
            out.extend(FiniteFlatSet([f]) for f in fam.flats)
        elif isinstance(fam, TranslateFamily):
            if isinstance(fam.base, PointSet):
                out.extend(
                    TranslateFamily(PointSet([p], fam.base.field), fam.direction)
                    for p in fam.base.points
                )
            else:
                out.append(fam)
        else:
            raise TorusflowError(f"unknown family type {type(fam).__name__}")
    return out


@dataclass
class FlowComponent:
    """One piece pi(C) + T of the limit set."""

    base: object                 # PointSet | AffineSet | CurveImage, inside W-perp
    V: Subspace                  # linear span of the neat family
    torus: Optional[ClosedSubgroupDescriptor]   # None for raw predictions
    dim_C_internal: int          # real dimension of C
    dim_C: int                   # dimension in the problem's units
    label: str = ""

    @property
    def effective_span(self) -> Subspace:
        return self.torus.W if self.torus is not None else self.V

    def describe(self):
        d = {
            "C": self.base.describe(),
            "dim_C": self.dim_C,
            "V": [[repr(e) for e in v] for v in self.V.basis],
        }
        if self.torus is not None:
            d["W"] = [[repr(e) for e in v] for v in self.torus.W.basis]
            d["lattice_points"] = [
                [repr(e) for e in v] for v in self.torus.lattice_points
            ]
            d["torus_dim"] = self.torus.torus_dim
        if self.label:
            d["label"] = self.label
        return d

    def sort_key(self):
        base_key = {
            "points": 0,
            "affine": 1,
            "curve": 2,
        }[self.base.kind]
        return (self.effective_span.key(), self.V.key(), base_key)


@dataclass
class FlowDescription:
    """The computed (or predicted) limit set as a list of components."""

    components: list
    lattice: Lattice
    mode: str
    span_condition: Optional[str]
    provenance: str
    diagnostics: dict = dc_field(default_factory=dict)

    @property
    def is_empty(self):
        return not self.components

    def describe(self):
        return {
            "mode": self.mode,
            "span_condition": self.span_condition,
            "provenance": self.provenance,
            "components": [c.describe() for c in self.components],
            "diagnostics": self.diagnostics,
        }


def _mode_dim(real_dim, mode, complex_units):
    """Base dimension in the problem's units.

    Complex bases normally have even real dimension; re-projection into the
    complement of a non-J-stable rational closure can break that, in which
    case the odd real dimension rounds up (conservative for the dimension
    clause, which the pre-projection base already satisfied).
    """
    if mode == "complex" and complex_units:
        return (real_dim + 1) // 2
    return real_dim


def _family_component(family, lat: Lattice, mode, complex_units) -> FlowComponent:
    V = family.linear_span()
    tc = torus_closure(V, lat)
    W = tc.W
    if isinstance(family, FiniteFlatSet):
        if len(family.flats) != 1:
            raise InternalInvariantError("finite families must be neat singletons")
        flat = family.flats[0]
        c = perp_base_point(flat, W)
        base = PointSet([c], lat.field)
    else:
        base = family.base.project(W)
    dim_internal = base.dim
    return FlowComponent(
        base=base,
        V=V,
        torus=tc,
        dim_C_internal=dim_internal,
        dim_C=_mode_dim(dim_internal, mode, complex_units),
    )


def _base_contained(inner, outer, W: Subspace):
    """Conservative exact containment of base sets modulo W."""
    field = W.field
    if isinstance(outer, PointSet):
        targets = outer.points
        dirs = []
    elif isinstance(outer, AffineSet):
        targets = [outer.flat.base_point]
        dirs = list(outer.flat.directions.basis)
    else:
        return False
    hull = dirs + list(W.basis)
    if isinstance(inner, PointSet):
        probes = inner.points
        inner_dirs = []
    elif isinstance(inner, AffineSet):
        probes = [inner.flat.base_point]
        inner_dirs = list(inner.flat.directions.basis)
    else:
        return False
    for v in inner_dirs:
        if not xl.in_span(hull, v, field):
            return False
    for p in probes:
        if not any(
            xl.in_span(hull, xl.vec_sub(p, q), field) for q in targets
        ):
            return False
    return True


def _prune_redundant(components):
    """Drop components whose (C, W) is contained in another's.

    Curve bases are never pruned: containment is undecidable at this
    representation level.
    """
    keep = [True] * len(components)
    for i, ci in enumerate(components):
        if isinstance(ci.base, CurveImage):
            continue
        for j, cj in enumerate(components):
            if i == j or not keep[j] or isinstance(cj.base, CurveImage):
                continue
            if not cj.effective_span.contains(ci.effective_span):
                continue
            if _base_contained(ci.base, cj.base, cj.effective_span):
                same = cj.effective_span == ci.effective_span and _base_contained(
                    cj.base, ci.base, ci.effective_span
                )
                if not same or i > j:
                    keep[i] = False
                    break
    return [c for c, k in zip(components, keep) if k]


def flow_set(X: VarietyInput, lat: Lattice) -> FlowDescription:
    """Compute the limit-set decomposition for a symbolic variety.

    A trivial lattice or a bounded variety produces a definite empty result,
    not an error.
    """
    if lat.ambient_dim != X.internal_dim:
        raise TorusflowError("lattice and variety ambient dimensions disagree")
    span_condition = None
    complex_units = False
    if X.mode == "complex":
        span_condition = check_span_condition(lat)
        complex_units = span_condition == COMPLEX_THEOREM
    L = lat.span
    families = variety_asymptotic_flats(X, L, complex_flats=complex_units)
    neat = group_neat(families)
    components = [
        _family_component(fam, lat, X.mode, complex_units) for fam in neat
    ]
    components = _prune_redundant(components)
    components.sort(key=FlowComponent.sort_key)

    declared = X.declared_dim
    if X.mode == "complex" and not complex_units:
        declared = 2 * X.declared_dim
    for comp in components:
        effective_dim = (
            comp.dim_C if (X.mode == "real" or complex_units) else comp.dim_C_internal
        )
        if effective_dim >= declared:
            raise InternalInvariantError(
                "component dimension reached the variety dimension"
            )
        if not L.contains(comp.V):
            raise InternalInvariantError("component span escaped the lattice span")
    return FlowDescription(
        components=components,
        lattice=lat,
        mode=X.mode,
        span_condition=span_condition,
        provenance="computed_symbolic",
        diagnostics={"family_count": len(neat)},
    )


def predicted_flow(components, lat: Lattice, mode, span_condition=None):
    """Wrap user-supplied (C, V) pairs for verification.

    Predictions need no torus certification: the verifier only measures
    distances to C + V + Lambda.  When V does lie in the lattice span the
    torus closure is attached for coverage enumeration.
    """
    comps = []
    for base, V, label in components:
        torus = None
        if lat.span.contains(V):
            torus = torus_closure(V, lat)
            base = base.project(torus.W)
        comps.append(
            FlowComponent(
                base=base,
                V=V,
                torus=torus,
                dim_C_internal=base.dim,
                dim_C=base.dim,
                label=label,
            )
        )
    return FlowDescription(
        components=comps,
        lattice=lat,
        mode=mode,
        span_condition=span_condition,
        provenance="user_supplied_predicted",
    )


def closure_description(X: VarietyInput, lat: Lattice, flow=None):
    """Report combining the image of X with its limit set.

    The image itself is X plus the reduction rule; when the limit set is
    empty the image is closed and the report says so.
    """
    if flow is None:
        flow = flow_set(X, lat)
    report = {
        "pi_x": {
            "pieces": [
                {"kind": p.kind, "label": getattr(p, "label", p.kind)}
                for p in X.pieces
            ],
            "reduction": "coordinates taken modulo the lattice",
        },
        "flow": flow.describe(),
        "pi_x_closed": flow.is_empty,
    }
    if flow.is_empty:
        report["note"] = "flow set is empty; pi(X) is closed"
    return report
