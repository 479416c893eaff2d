"""Numeric ground-truth verification by far-point sampling.

The defining picture: the limit set is the decreasing intersection over R of
the closures of the projected variety outside the ball of radius R.  The
verifier samples the variety on radial shells, reduces modulo the lattice,
and compares against a predicted decomposition two ways:

* containment: every reduced in-window sample must be within tolerance of
  some predicted component (max distance is reported);
* coverage: the samples must hit almost every grid cell of each component's
  compact part (catches predictions that are too large).

Samples whose component transverse to the lattice span leaves the window
have not converged toward any coset; they are reported as escaped mass and
excluded from both checks.  Sampling is deterministic per (seed, shell,
piece), so identical configurations give byte-identical reports.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from ._kernels import backend_name, min_distance_batch
from .errors import ShellStarved, TorusflowError
from .flats import AffineSet, CurveImage, PointSet, to_internal
from .flow import FlowDescription
from .lattice import Lattice, integer_relations


@dataclass
class SampleConfig:
    """Knobs for the far-point sampler and the two-sided checks."""

    radius_min: float = 100.0
    count: int = 10000            # total samples, split across shells
    seed: int = 0
    grid_eps: float = 0.05
    tolerance: float = 1e-2
    shells: int = 4
    coverage_threshold: float = 0.95
    window: float = 10.0          # transverse window half-width
    curve_nodes: int = 10000
    residual_tolerance: float = 1e-9
    relation_digits: int = 9      # scale for the heuristic relation check

    def __post_init__(self):
        if self.count <= 0:
            raise TorusflowError("count must be positive")
        if self.grid_eps <= 0 or self.tolerance <= 0 or self.radius_min <= 0:
            raise TorusflowError("radius, grid_eps and tolerance must be positive")

    def radius_schedule(self):
        return [self.radius_min * (2.0**k) for k in range(self.shells)]


@dataclass
class ShellSamples:
    index: int
    radius: float
    labels: list
    params: list
    logical: np.ndarray
    internal: np.ndarray


def _rng(cfg: SampleConfig, shell: int, piece: int):
    return np.random.default_rng([cfg.seed, shell, piece])


def _sample_branch(piece, count, radius, rng, mode):
    t = np.exp(rng.uniform(math.log(radius), math.log(radius * 1e3), size=count))
    params = t.astype(complex)
    if piece.rays:
        rays = np.array([r.to_complex() for r in piece.rays])
        choice = rng.integers(0, len(rays), size=count)
        params = t * rays[choice]
    logical = piece.evaluate(params)
    return [(p,) for p in params], logical


def _sample_affine(piece, count, radius, rng, mode, lat, window):
    flat = piece.flat
    base = flat.float_base()
    dirs = flat.directions
    if lat is not None and dirs.dim:
        inside = dirs.intersect(lat.span)
        in_f = inside.float_basis()
        # orthonormal rows spanning the rest of the directions
        proj_in = inside.float_projector()
        rest = dirs.float_basis() - dirs.float_basis() @ proj_in.T
        _, s, vt = np.linalg.svd(rest) if len(rest) else (None, [], None)
        rank = int(np.sum(np.asarray(s) > 1e-10))
        out_f = vt[:rank] if rank else np.zeros((0, dirs.ambient_dim))
    else:
        in_f = dirs.float_basis()
        out_f = np.zeros((0, dirs.ambient_dim))
    din, dout = len(in_f), len(out_f)
    bnorm = float(np.linalg.norm(base))
    r_lo = radius + bnorm + 4.0 * window * math.sqrt(dout + 1)
    r = np.exp(rng.uniform(math.log(r_lo), math.log(r_lo * 1e3), size=count))
    pts = np.tile(base, (count, 1))
    if din:
        g = rng.normal(size=(count, din))
        g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
        qin, _ = np.linalg.qr(in_f.T)
        pts = pts + (g * r[:, None]) @ qin.T[:din]
    if dout:
        u = rng.uniform(-2.0 * window, 2.0 * window, size=(count, dout))
        pts = pts + u @ out_f
    params = [(float(ri),) for ri in r]
    return params, pts


def _sample_graph(piece, count, radius, rng, mode):
    # two log-uniform bands per variable: near-field values witness the
    # components passing close to the coordinate origin, far-field ones push
    # the point outward; mid-scale values have not converged toward the limit
    # set at these radii and only add noise
    low = rng.uniform(math.log(1e-6), math.log(2e-2), size=(count, piece.nvars))
    high = rng.uniform(
        math.log(30.0), math.log(radius * 1e3), size=(count, piece.nvars)
    )
    pick = rng.integers(0, 2, size=(count, piece.nvars)).astype(bool)
    mag = np.exp(np.where(pick, high, low))
    if mode == "complex" and piece.complex_vars:
        phase = rng.uniform(0.0, 2.0 * math.pi, size=(count, piece.nvars))
        vars_ = mag * np.exp(1j * phase)
    else:
        sign = rng.choice([-1.0, 1.0], size=(count, piece.nvars))
        vars_ = (mag * sign).astype(complex)
    logical = piece.evaluate(vars_)
    params = [tuple(row) for row in vars_]
    return params, logical


def sample_far_points(X, cfg: SampleConfig, lat: Optional[Lattice] = None):
    """Deterministic far-point samples, shell by shell.

    Raises ShellStarved when a shell cannot be filled within the rejection
    cap; a bounded variety triggers exactly that, which is itself a result.
    """
    schedule = cfg.radius_schedule()
    per_shell = -(-cfg.count // cfg.shells)
    pieces = X.pieces
    out = []
    for shell, radius in enumerate(schedule):
        quota = [per_shell // len(pieces)] * len(pieces)
        for i in range(per_shell - sum(quota)):
            quota[i] += 1
        labels, params, logicals, internals = [], [], [], []
        for pi, piece in enumerate(pieces):
            need = quota[pi]
            if need == 0:
                continue
            rng = _rng(cfg, shell, pi)
            got_params, got_internal, got_logical = [], [], []
            attempts = 0
            while len(got_params) < need:
                draw = max(1024, 2 * (need - len(got_params)))
                attempts += draw
                if attempts > 1_000_000:
                    raise ShellStarved(shell, radius)
                if piece.kind == "branch":
                    p, logical = _sample_branch(piece, draw, radius, rng, X.mode)
                elif piece.kind == "affine":
                    p, internal = _sample_affine(
                        piece, draw, radius, rng, X.mode, lat, cfg.window
                    )
                    logical = None
                elif piece.kind == "graph":
                    p, logical = _sample_graph(piece, draw, radius, rng, X.mode)
                else:
                    raise TorusflowError(f"cannot sample piece kind {piece.kind!r}")
                if logical is not None:
                    internal = to_internal(logical, X.mode)
                norms = np.linalg.norm(internal, axis=1)
                ok = norms >= radius
                for keep_idx in np.nonzero(ok)[0]:
                    if len(got_params) >= need:
                        break
                    got_params.append(p[keep_idx])
                    got_internal.append(internal[keep_idx])
                    got_logical.append(
                        logical[keep_idx]
                        if logical is not None
                        else internal[keep_idx].astype(complex)
                    )
            labels.extend([getattr(piece, "label", piece.kind)] * need)
            params.extend(got_params)
            internals.extend(got_internal)
            logicals.extend(got_logical)
        out.append(
            ShellSamples(
                index=shell,
                radius=radius,
                labels=labels,
                params=params,
                logical=np.array(logicals),
                internal=np.array(internals, dtype=float),
            )
        )
    return out


# ---------------------------------------------------------------------------
# Component evaluators
# ---------------------------------------------------------------------------


def _null_space_rows(basis, n):
    """Orthonormal rows spanning the complement of the given row span."""
    if basis is None or len(basis) == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(np.asarray(basis, dtype=float))
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if len(s) else 1.0)))
    return vt[rank:]


class ComponentEvaluator:
    """Distance and cell machinery for one predicted component."""

    def __init__(self, comp, lat: Lattice, cfg: SampleConfig):
        self.comp = comp
        self.lat = lat
        self.cfg = cfg
        W = comp.effective_span
        n = W.ambient_dim
        w_basis = W.float_basis() if W.dim else np.zeros((0, n))
        base = comp.base

        if isinstance(base, AffineSet):
            dirs = base.flat.directions.float_basis()
            span_rows = np.vstack([w_basis, dirs]) if len(dirs) else w_basis
            self.proj = _null_space_rows(span_rows, n)
            c_red, _, _ = lat.reduce_points(base.flat.float_base()[None, :])
            self.nodes_full = c_red
            self.curve_params = None
            self.base_dirs = dirs
        elif isinstance(base, PointSet):
            self.proj = _null_space_rows(w_basis, n)
            pts = base.float_points()
            c_red, _, _ = lat.reduce_points(pts) if len(pts) else (pts, None, None)
            self.nodes_full = c_red
            self.curve_params = None
            self.base_dirs = None
        elif isinstance(base, CurveImage):
            self.proj = _null_space_rows(w_basis, n)
            lo, hi = base.param_range
            params = np.linspace(lo, hi, cfg.curve_nodes)
            raw = base.sample_at(params)
            nodes_red, _, _ = lat.reduce_points(raw)
            self.nodes_full = nodes_red
            self.curve_params = params
            self.curve_raw = raw
            self.base_dirs = None
        else:
            raise TorusflowError(f"unknown base kind {base.kind!r}")

        self.nodes = self.nodes_full @ self.proj.T
        window_radius = 2.0 * self._cell_diameter() + cfg.tolerance + 1.0
        coeff_range = self._translate_range(window_radius)
        offsets_full = lat.translates(coeff_range)
        offs = offsets_full @ self.proj.T
        if len(offs):
            rounded = np.round(offs, 9)
            _, idx = np.unique(rounded, axis=0, return_index=True)
            offs = offs[np.sort(idx)]
        self.offsets = offs

        # torus coordinates: integer-dual map, well-defined modulo the lattice
        self.torus_dim = comp.torus.torus_dim if comp.torus is not None else 0
        if self.torus_dim:
            self.torus_solve = comp.torus.torus_coordinate_matrix(lat)
        else:
            self.torus_solve = None

    def _cell_diameter(self):
        B = self.lat.float_basis()
        if not len(B):
            return 1.0
        return float(np.sum(np.linalg.norm(B, axis=1)))

    def _translate_range(self, radius):
        B = self.lat.float_basis()
        if not len(B):
            return 0
        shortest = float(np.min(np.linalg.norm(B, axis=1)))
        return min(4, max(1, int(math.ceil(radius / max(shortest, 1e-9)))))

    def distances(self, reduced):
        """Distance from each reduced sample to C + W + Lambda (windowed)."""
        pts = reduced @ self.proj.T
        dists, node_idx = min_distance_batch(pts, self.offsets, self.nodes)
        if self.curve_params is not None and len(self.curve_params) > 1:
            dists = self._refine_curve(reduced, pts, dists, node_idx)
        return dists

    def _refine_curve(self, reduced, pts, dists, node_idx):
        """Local parameter refinement around the best node for rough samples."""
        base = self.comp.base
        spacing = self.curve_params[1] - self.curve_params[0]
        worst = np.nonzero(dists > 0.25 * self.cfg.tolerance)[0]
        if not len(worst):
            return dists
        if len(worst) > 4096:
            # refine the roughest block only; a run this far off fails anyway
            worst = worst[np.argsort(dists[worst])[-4096:]]
        out = dists.copy()
        for idx in worst:
            p0 = self.curve_params[node_idx[idx]]
            local = np.linspace(p0 - spacing, p0 + spacing, 33)
            raw = base.sample_at(local)
            red, _, _ = self.lat.reduce_points(raw)
            proj_nodes = red @ self.proj.T
            d, _ = min_distance_batch(
                pts[idx : idx + 1], self.offsets, proj_nodes
            )
            out[idx] = min(out[idx], d[0])
        return out

    # -- coverage cells ------------------------------------------------------

    def torus_cells(self, reduced):
        """Integer torus-cell tuple per sample (empty tuple if no torus)."""
        m = len(reduced)
        if not self.torus_dim:
            return [()] * m
        u = reduced @ self.torus_solve.T
        u = u - np.floor(u)
        k = int(math.ceil(1.0 / self.cfg.grid_eps))
        cells = np.minimum((u / self.cfg.grid_eps).astype(int), k - 1)
        return [tuple(row) for row in cells]

    def base_cells(self, reduced):
        """Base-cell id per sample, or None when out of window."""
        base = self.comp.base
        eps = self.cfg.grid_eps
        w = self.cfg.window
        m = len(reduced)
        if isinstance(base, PointSet):
            if len(self.nodes) == 0:
                return [None] * m
            pts = reduced @ self.proj.T
            _, node_idx = min_distance_batch(pts, self.offsets, self.nodes)
            return [("pt", int(i)) for i in node_idx]
        if isinstance(base, AffineSet):
            dirs = self.base_dirs
            if dirs is None or len(dirs) == 0:
                return [("pt", 0)] * m
            q, _ = np.linalg.qr(np.asarray(dirs, dtype=float).T)
            onb = q.T
            c = self.nodes_full[0]
            v = (reduced - c) @ onb.T
            cells = []
            for row in v:
                if np.any(np.abs(row) > w):
                    cells.append(None)
                else:
                    cells.append(tuple(((row + w) / eps).astype(int)))
            return cells
        # curve: bucket by arclength of the raw (unreduced) polyline
        pts = reduced @ self.proj.T
        _, node_idx = min_distance_batch(pts, self.offsets, self.nodes)
        cum = self._curve_cumlen()
        return [("arc", int(cum[i] // eps)) for i in node_idx]

    def _curve_cumlen(self):
        if not hasattr(self, "_cumlen"):
            seg = np.linalg.norm(np.diff(self.curve_raw, axis=0), axis=1)
            self._cumlen = np.concatenate([[0.0], np.cumsum(seg)])
        return self._cumlen

    def total_cells(self):
        base = self.comp.base
        eps = self.cfg.grid_eps
        w = self.cfg.window
        k = int(math.ceil(1.0 / eps))
        torus_total = k**self.torus_dim
        if isinstance(base, PointSet):
            base_total = max(1, len(base.points))
        elif isinstance(base, AffineSet):
            b = 0 if self.base_dirs is None else len(self.base_dirs)
            base_total = max(1, int(math.ceil(2.0 * w / eps)) ** b)
        else:
            cum = self._curve_cumlen()
            base_total = max(1, int(math.ceil(cum[-1] / eps)))
        return torus_total * base_total


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def _thread_count():
    try:
        return max(1, int(os.environ.get("TORUSFLOW_THREADS", "1")))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    """Map preserving order; threads only when TORUSFLOW_THREADS > 1."""
    workers = _thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def containment_check(reduced, predicted: FlowDescription, cfg, evaluators=None,
                      per_component=None):
    """Max distance from reduced in-window samples to the predicted set.

    Empty predictions pass vacuously only when no sample stays in-window.
    """
    lat = predicted.lattice
    if evaluators is None:
        evaluators = [ComponentEvaluator(c, lat, cfg) for c in predicted.components]
    if len(reduced) == 0:
        return 0.0, np.zeros(0), None
    if not evaluators:
        return float("inf"), np.full(len(reduced), np.inf), reduced[0]
    if per_component is None:
        per_component = _map_ordered(lambda ev: ev.distances(reduced), evaluators)
    all_d = np.full(len(reduced), np.inf)
    for d in per_component:
        np.minimum(all_d, d, out=all_d)
    worst = int(np.argmax(all_d))
    return float(np.max(all_d)), all_d, reduced[worst]


def coverage_check(predicted: FlowDescription, reduced, cfg, evaluators=None,
                   per_component=None):
    """Fraction of each component's cells hit by the reduced samples."""
    lat = predicted.lattice
    if evaluators is None:
        evaluators = [ComponentEvaluator(c, lat, cfg) for c in predicted.components]
    assign_tol = max(cfg.tolerance, cfg.grid_eps)
    fractions = []
    hit_sets = []
    for idx, ev in enumerate(evaluators):
        hits = set()
        if len(reduced):
            d = (
                per_component[idx]
                if per_component is not None
                else ev.distances(reduced)
            )
            sel = np.nonzero(d <= assign_tol)[0]
            if len(sel):
                sub = reduced[sel]
                tcells = ev.torus_cells(sub)
                bcells = ev.base_cells(sub)
                for tc, bc in zip(tcells, bcells):
                    if bc is not None:
                        hits.add((bc, tc))
        total = ev.total_cells()
        fractions.append(min(1.0, len(hits) / total))
        hit_sets.append(hits)
    return fractions, hit_sets


def _window_mask(reduced, lat: Lattice, window):
    """Samples whose component transverse to the lattice span is in-window."""
    if len(reduced) == 0:
        return np.zeros(0, dtype=bool)
    perp_proj = lat.span.float_complement_projector()
    perp = reduced @ perp_proj.T
    return np.linalg.norm(perp, axis=1) <= window


def _global_cells(reduced, eps):
    cells = np.floor(np.asarray(reduced) / eps).astype(np.int64)
    return {tuple(row) for row in cells}


@dataclass
class VerificationReport:
    """Everything the two-sided verification produced, JSON-ready."""

    passed: bool
    containment_passed: bool
    coverage_passed: bool
    max_containment_distance: float
    coverage: list
    escaped_mass: float
    residual_max: float
    mismatch_flag: bool
    per_shell: list
    worst_sample: Optional[list]
    backend: str
    config: dict
    span_condition: Optional[str] = None
    heuristic_relations: list = dc_field(default_factory=list)

    def to_dict(self):
        return {
            "schema_version": 1,
            "passed": self.passed,
            "containment_passed": self.containment_passed,
            "coverage_passed": self.coverage_passed,
            "max_containment_distance": self.max_containment_distance,
            "coverage": self.coverage,
            "escaped_mass": self.escaped_mass,
            "residual_max": self.residual_max,
            "mismatch_flag": self.mismatch_flag,
            "per_shell": self.per_shell,
            "worst_sample": self.worst_sample,
            "backend": self.backend,
            "config": self.config,
            "span_condition": self.span_condition,
            "heuristic_relations": self.heuristic_relations,
        }


def shell_stability(shell_cell_sets):
    """Newly hit cells per shell relative to all earlier shells."""
    seen = set()
    counts = []
    for cells in shell_cell_sets:
        new = len(cells - seen)
        counts.append(new)
        seen |= cells
    return counts


def run_verification(X, lat: Lattice, predicted: FlowDescription,
                     cfg: SampleConfig) -> VerificationReport:
    """Sample, reduce, and run both checks; deterministic per config."""
    shells = sample_far_points(X, cfg, lat)
    evaluators = [ComponentEvaluator(c, lat, cfg) for c in predicted.components]

    all_in_window = []
    per_shell = []
    shell_cells = []
    residual_max = 0.0
    escaped = 0
    total = 0
    for sh in shells:
        reduced, _, _ = lat.reduce_points(sh.internal)
        residual_max = max(
            residual_max, lat.reduction_residual(sh.internal, reduced)
        )
        mask = _window_mask(reduced, lat, cfg.window)
        in_win = reduced[mask]
        total += len(reduced)
        escaped += int(np.sum(~mask))
        all_in_window.append(in_win)
        cells = _global_cells(in_win, cfg.grid_eps) if len(in_win) else set()
        shell_cells.append(cells)
        per_shell.append(
            {
                "shell": sh.index,
                "radius": sh.radius,
                "samples": int(len(reduced)),
                "escaped": int(np.sum(~mask)),
            }
        )
    new_cells = shell_stability(shell_cells)
    for entry, nc in zip(per_shell, new_cells):
        entry["new_cells"] = nc

    in_window = (
        np.vstack([a for a in all_in_window if len(a)])
        if any(len(a) for a in all_in_window)
        else np.zeros((0, lat.ambient_dim))
    )

    mismatch = predicted.is_empty and len(in_window) > 0
    if predicted.is_empty:
        max_dist = float("inf") if len(in_window) else 0.0
        worst = in_window[0].tolist() if len(in_window) else None
        fractions = []
    else:
        per_component = (
            _map_ordered(lambda ev: ev.distances(in_window), evaluators)
            if len(in_window)
            else None
        )
        max_dist, all_d, worst_vec = containment_check(
            in_window, predicted, cfg, evaluators, per_component
        )
        worst = worst_vec.tolist() if worst_vec is not None else None
        fractions, _ = coverage_check(
            predicted, in_window, cfg, evaluators, per_component
        )
        # per-shell maxima: for branch inputs with certified remainder decay
        # these should not increase with the shell radius
        offset = 0
        for entry, chunk in zip(per_shell, all_in_window):
            k = len(chunk)
            entry["max_distance"] = (
                float(np.max(all_d[offset : offset + k])) if k else 0.0
            )
            offset += k

    containment_ok = max_dist <= cfg.tolerance
    coverage_ok = all(f >= cfg.coverage_threshold for f in fractions)

    relations = []
    for ci, comp in enumerate(predicted.components):
        if comp.V.dim == 1:
            vec = [e.to_float() for e in comp.V.basis[0]]
            rel = integer_relations(vec, cfg.relation_digits)
            if rel:
                relations.append(
                    {"component": ci, "relations": rel, "certified": False}
                )

    return VerificationReport(
        passed=containment_ok and coverage_ok and not mismatch,
        containment_passed=containment_ok,
        coverage_passed=coverage_ok,
        max_containment_distance=max_dist,
        coverage=fractions,
        escaped_mass=escaped / total if total else 0.0,
        residual_max=residual_max,
        mismatch_flag=mismatch,
        per_shell=per_shell,
        worst_sample=worst,
        backend=backend_name(),
        config={
            "radius_min": cfg.radius_min,
            "count": cfg.count,
            "seed": cfg.seed,
            "grid_eps": cfg.grid_eps,
            "tolerance": cfg.tolerance,
            "shells": cfg.shells,
            "coverage_threshold": cfg.coverage_threshold,
            "window": cfg.window,
        },
        span_condition=predicted.span_condition,
        heuristic_relations=relations,
    )


# ---------------------------------------------------------------------------
# Orbit sampling (density oracle for subspace closures)
# ---------------------------------------------------------------------------


def subspace_orbit(V, lat: Lattice, count, seed=0, spread=2000.0):
    """Reduced samples of the subspace V: the numeric orbit in the quotient."""
    rng = np.random.default_rng([seed, 977])
    basis = V.float_basis()
    if not len(basis):
        return np.zeros((1, lat.ambient_dim))
    coeffs = rng.uniform(-spread, spread, size=(count, len(basis)))
    pts = coeffs @ basis
    reduced, _, _ = lat.reduce_points(pts)
    return reduced


def orbit_coverage(descriptor, lat, reduced, eps):
    """(coverage fraction of W's torus cells, max distance off the W fiber)."""
    if descriptor.torus_dim == 0:
        off = np.linalg.norm(reduced, axis=1)
        return (1.0 if len(reduced) else 0.0), float(np.max(off)) if len(off) else 0.0
    solve = descriptor.torus_coordinate_matrix(lat)
    u = reduced @ solve.T
    u -= np.floor(u)
    k = int(math.ceil(1.0 / eps))
    cells = np.minimum((u / eps).astype(int), k - 1)
    hit = {tuple(row) for row in cells}
    # distance off the fiber: orthogonal part, minimized over translates
    W = descriptor.W
    proj = W.float_complement_projector()
    perp = reduced @ proj.T
    offsets = lat.translates(2) @ proj.T
    if len(offsets):
        rounded = np.unique(np.round(offsets, 9), axis=0)
        d, _ = min_distance_batch(perp, rounded, np.zeros((1, perp.shape[1])))
    else:
        d = np.linalg.norm(perp, axis=1)
    off_max = float(np.max(d)) if len(d) else 0.0
    return len(hit) / (k**descriptor.torus_dim), off_max


def _fmt_param(p):
    if hasattr(p, "item"):
        p = p.item()
    if isinstance(p, complex):
        return repr(p.real) if p.imag == 0 else repr(p).replace(" ", "")
    return repr(p)


def write_sample_csv(path, shells, lat: Lattice, predicted=None, cfg=None):
    """CSV dump: shell, parameters, raw and reduced coordinates, distance."""
    evaluators = None
    if predicted is not None and cfg is not None and predicted.components:
        evaluators = [
            ComponentEvaluator(c, lat, cfg) for c in predicted.components
        ]
    max_params = max(
        (len(sh.params[0]) if sh.params else 0 for sh in shells), default=0
    )
    n = lat.ambient_dim
    header = ["shell_index"]
    header += [f"param_{i}" for i in range(max_params)]
    header += [f"raw_{i}" for i in range(n)]
    header += [f"reduced_{i}" for i in range(n)]
    header += ["min_distance"]
    lines = [",".join(header)]
    for sh in shells:
        reduced, _, _ = lat.reduce_points(sh.internal)
        if evaluators:
            dists = np.full(len(reduced), np.inf)
            for ev in evaluators:
                np.minimum(dists, ev.distances(reduced), out=dists)
        else:
            dists = np.full(len(reduced), np.nan)
        for i in range(len(reduced)):
            row = [str(sh.index)]
            prms = list(sh.params[i]) + [""] * (max_params - len(sh.params[i]))
            row += [_fmt_param(p) if p != "" else "" for p in prms]
            row += [repr(float(x)) for x in sh.internal[i]]
            row += [repr(float(x)) for x in reduced[i]]
            row += [repr(float(dists[i]))]
            lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return len(lines) - 1
