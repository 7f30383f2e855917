"""Gluing equations: solve perpendicular lengths and assemble the volume.

A decomposition plan instantiates, for a vector of perpendicular lengths
(one per shared ultra-parallel face pair), one generalised tetrahedron per
plan entry.  The geometric configuration is the common zero of the
residual map

    residual_v(l) = pi - (1/2) * sum over tetrahedra containing v of
                    the recovered dihedral angle at v's perpendicular,

i.e. the total angle around each perpendicular equals 2*pi.  `potential`
is the reporting quantity Vol-sum + pi * length-sum; the function whose
l-gradient is exactly minus the residual (and whose value at a solution
collapses to the plain volume sum) is `critical_potential`, which per
tetrahedron augments the volume by (1/2) sum l_j a_j over its
perpendiculars before subtracting pi * l_v once per variable.  Solving is
damped Newton with the analytic angle Jacobian, multi-started to surface
non-uniqueness (overlapping, butterfly-like instantiations give extra
roots on some inputs; all roots are reported, never silently dropped).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .tetra import (
    BranchCutError,
    DegenerateShapeError,
    NotRealizableError,
    angle_at_length_edge,
    angle_jacobian,
    check_realizable,
    volume,
)

# shape states the solver must step around rather than crash on
_BAD_SHAPE = (NotRealizableError, DegenerateShapeError, BranchCutError,
              OverflowError)

# hard per-length cap during iteration; cosh of anything larger is useless
_L_CAP = 50.0

__all__ = [
    "InfeasibleError",
    "NonconvergenceError",
    "PolyhedronSpec",
    "SolveOptions",
    "GluingSolution",
    "instantiate",
    "potential",
    "critical_potential",
    "residual",
    "residual_jacobian",
    "solve",
    "solve_polyhedron",
    "is_width_uniform_certificate",
]


class InfeasibleError(ValueError):
    """No realizable length assignment exists among the attempted starts."""


class NonconvergenceError(RuntimeError):
    """Newton failed from every start; carries the best residual seen."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass(frozen=True)
class PolyhedronSpec:
    """A labeled skeleton with a dihedral angle on every edge."""

    graph: object
    name: str = ""

    def validate(self):
        self.graph.validate()
        if not self.graph.angles_complete():
            raise ValueError("angles required")
        for e in self.graph.edge_ids:
            a = self.graph.angle(e)
            value = math.pi * a.numerator / a.denominator
            if not 0.0 < value < math.pi:
                raise ValueError(
                    "edge %d angle %s*pi outside (0, 1)" % (e, a))

    def angle_map(self):
        """Unordered face pair -> Fraction multiple of pi."""
        out = {}
        for e in self.graph.edge_ids:
            out[self.graph.edge_face_pair(e)] = self.graph.angle(e)
        return out


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-10
    l_max: float = 5.0
    grid: int = 8          # multi-start points per axis
    max_starts: int = 128  # cap on grid starts for high-dimensional plans
    max_iter: int = 60
    seed: int = 0


def _angle_map(spec):
    return None if spec is None else spec.angle_map()


def _lengths_vector(plan, x):
    return {pair: float(v) for pair, v in zip(plan.variables, x)}


def instantiate(plan, spec, lengths):
    """Realizable TetrahedronShapes for all plan entries, or raise."""
    angles = _angle_map(spec)
    shapes = []
    for tet in plan.tetrahedra:
        shape = tet.shape(lengths, angles)
        try:
            check_realizable(shape)
        except NotRealizableError as exc:
            raise NotRealizableError(
                "tetrahedron %s with lengths %s: %s"
                % (list(tet.faces),
                   {p: round(lengths[p], 6) for p in tet.length_pairs}, exc))
        shapes.append(shape)
    return shapes


def potential(plan, spec, lengths):
    """Reported potential: volume sum plus pi times the total length."""
    shapes = instantiate(plan, spec, lengths)
    return (sum(volume(s) for s in shapes)
            + math.pi * sum(lengths[v] for v in plan.variables))


def critical_potential(plan, spec, lengths):
    """The function whose critical points are the gluing solutions.

    Its gradient in each length is exactly minus the residual there, and
    at a residual zero its value equals the plain volume sum.
    """
    angles = _angle_map(spec)
    total = -math.pi * sum(lengths[v] for v in plan.variables)
    for tet in plan.tetrahedra:
        shape = tet.shape(lengths, angles)
        check_realizable(shape)
        total += volume(shape)
        for pos in sorted(shape.length_positions):
            pair = tet.position_pair(pos)
            total += 0.5 * lengths[pair] * angle_at_length_edge(shape, pos)
    return total


def residual(plan, spec, lengths):
    """pi - half the angle sum around each perpendicular, as a dict."""
    angles = _angle_map(spec)
    out = {v: math.pi for v in plan.variables}
    for tet in plan.tetrahedra:
        shape = tet.shape(lengths, angles)
        check_realizable(shape)
        for pos in sorted(shape.length_positions):
            out[tet.position_pair(pos)] -= (
                0.5 * angle_at_length_edge(shape, pos))
    return out


def residual_jacobian(plan, spec, lengths):
    """(residual vector, analytic Jacobian) in plan.variables order."""
    angles = _angle_map(spec)
    idx = {v: i for i, v in enumerate(plan.variables)}
    n = len(plan.variables)
    r = np.full(n, math.pi)
    jac = np.zeros((n, n))
    for tet in plan.tetrahedra:
        shape = tet.shape(lengths, angles)
        check_realizable(shape)
        positions = sorted(shape.length_positions)
        local = angle_jacobian(shape)
        for a, pos in enumerate(positions):
            v = idx[tet.position_pair(pos)]
            r[v] -= 0.5 * angle_at_length_edge(shape, pos)
            for b, pos2 in enumerate(positions):
                jac[v, idx[tet.position_pair(pos2)]] -= 0.5 * local[a, b]
    return r, jac


@dataclass(frozen=True)
class GluingSolution:
    plan: object
    lengths: dict
    volume: float
    residuals: dict
    tet_volumes: tuple
    multiplicity_note: tuple = field(default_factory=tuple)
    spec: object = None

    def to_json_dict(self):
        return {
            "lengths": {"%s|%s" % pair: l for pair, l in self.lengths.items()},
            "volume": self.volume,
            "residuals": {"%s|%s" % pair: r
                          for pair, r in self.residuals.items()},
            "tetrahedra": [
                {"faces": list(t.faces), "type": t.ttype.tag, "volume": v}
                for t, v in zip(self.plan.tetrahedra, self.tet_volumes)],
            "multiplicity_note": [
                {"lengths": {"%s|%s" % p: l for p, l in alt.items()}}
                for alt in self.multiplicity_note],
        }


def _realizable(plan, angles, lengths):
    try:
        for tet in plan.tetrahedra:
            check_realizable(tet.shape(lengths, angles))
        return True
    except _BAD_SHAPE:
        return False


def _newton(plan, spec, x0, opts):
    """Damped Newton from x0; returns (solved vector or None, best norm)."""
    angles = _angle_map(spec)
    x = np.asarray(x0, dtype=float)
    try:
        r, jac = residual_jacobian(plan, spec, _lengths_vector(plan, x))
    except _BAD_SHAPE:
        return None, np.inf
    best = np.max(np.abs(r))
    for _ in range(opts.max_iter):
        norm = np.max(np.abs(r))
        if norm <= opts.tol:
            return x, norm
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return None, best
        lam = 1.0
        while lam > 1e-7:
            cand = x + lam * step
            if np.all(cand > 0.0) and np.all(cand < _L_CAP):
                lens = _lengths_vector(plan, cand)
                if _realizable(plan, angles, lens):
                    try:
                        r2, jac2 = residual_jacobian(plan, spec, lens)
                    except _BAD_SHAPE:
                        lam *= 0.5
                        continue
                    if np.max(np.abs(r2)) < norm:
                        x, r, jac = cand, r2, jac2
                        best = min(best, np.max(np.abs(r)))
                        break
            lam *= 0.5
        else:
            return None, best
    norm = np.max(np.abs(r))
    return (x, norm) if norm <= opts.tol else (None, best)


def _starts(n, opts):
    """Default point first, then (a capped sample of) the axis grid."""
    yield np.full(n, 0.5)
    axis = [opts.l_max * (k + 1) / opts.grid for k in range(opts.grid)]
    total = opts.grid ** n
    if total <= opts.max_starts:
        for combo in itertools.product(axis, repeat=n):
            yield np.array(combo)
    else:
        rng = np.random.default_rng(opts.seed)
        for _ in range(opts.max_starts):
            yield np.array([axis[k] for k in rng.integers(0, opts.grid, n)])


def solve(plan, spec=None, options=None):
    """Find all gluing-equation roots reachable from the start set.

    The primary solution minimizes (residual norm, total length); every
    other distinct root goes into multiplicity_note.  Raises
    InfeasibleError when no start instantiates realizably and
    NonconvergenceError when Newton fails from every realizable start.
    """
    opts = options or SolveOptions()
    angles = _angle_map(spec)
    n = len(plan.variables)
    if n == 0:
        lens = {}
        shapes = instantiate(plan, spec, lens)
        vols = tuple(volume(s) for s in shapes)
        return GluingSolution(plan, lens, sum(vols), {}, vols, spec=spec)
    roots = []
    best_res = np.inf
    any_realizable = False
    for x0 in _starts(n, opts):
        if not _realizable(plan, angles, _lengths_vector(plan, x0)):
            continue
        any_realizable = True
        x, res = _newton(plan, spec, x0, opts)
        best_res = min(best_res, res)
        if x is None:
            continue
        if not any(np.max(np.abs(x - r)) < 1e-8 for r in roots):
            roots.append(x)
    if not any_realizable:
        raise InfeasibleError(
            "no realizable lengths among the starts; a common perpendicular "
            "may not exist (faces not ultra-parallel)")
    if not roots:
        raise NonconvergenceError(
            "Newton failed from every start (best residual %.3e)" % best_res,
            best_residual=best_res)
    roots.sort(key=lambda x: (np.max(np.abs(residual_jacobian(
        plan, spec, _lengths_vector(plan, x))[0])), float(np.sum(x))))
    primary = _lengths_vector(plan, roots[0])
    shapes = instantiate(plan, spec, primary)
    vols = tuple(volume(s) for s in shapes)
    return GluingSolution(
        plan, primary, sum(vols), residual(plan, spec, primary), vols,
        tuple(_lengths_vector(plan, x) for x in roots[1:]), spec)


def solve_polyhedron(graph, moves=None, options=None, name=""):
    """Reduce, plan, and solve a polyhedron in one call."""
    from .graph import plan_from_trace, reduce_graph

    trace = reduce_graph(graph, moves)
    plan = plan_from_trace(graph, trace)
    spec = PolyhedronSpec(graph, name) if graph.angles_complete() else None
    return trace, plan, solve(plan, spec, options)


def is_width_uniform_certificate(solution, tol=1e-8, margin=1e-3):
    """Best-effort sanity report on a solved configuration.

    Checks that every solved length is positive, every recovered dihedral
    (after folding) lies inside (0, pi), and the angle sums close.  Flags,
    without proving overlap, solutions where extra roots exist, where a
    recovered angle exceeds a full half-turn in magnitude before the mod-pi
    reduction (the reduction then hides a wrap), or where an angle or
    length sits within `margin` of degeneracy (near-tangent faces).  The
    pre-fold value carries a benign branch offset of one half-turn on
    perfectly embedded configurations, so only a full excess is flagged.
    """
    plan = solution.plan
    angles_map = _angle_map(solution.spec)
    flags = []
    details = {"angles": [], "lengths": dict(solution.lengths)}
    ok = True
    for pair, l in solution.lengths.items():
        if not l > 0.0:
            ok = False
            flags.append("nonpositive length at %s|%s" % pair)
        elif l < margin:
            flags.append("length %.2e at %s|%s nearly degenerate"
                         % ((l,) + pair))
    for pair, r in solution.residuals.items():
        if abs(r) > tol:
            ok = False
            flags.append("angle sum around %s|%s misses 2*pi by %.2e"
                         % (pair + (2.0 * abs(r),)))
    for tet in plan.tetrahedra:
        try:
            shape = tet.shape(solution.lengths, angles_map)
        except (ValueError,) + _BAD_SHAPE as exc:
            ok = False
            flags.append("tetrahedron %s not evaluable: %s"
                         % (list(tet.faces), exc))
            continue
        for pos in sorted(shape.length_positions):
            raw = angle_at_length_edge(shape, pos, fold=False)
            folded = angle_at_length_edge(shape, pos)
            details["angles"].append(
                {"faces": list(tet.faces), "pair": tet.position_pair(pos),
                 "angle": folded})
            if not (0.0 < folded < math.pi):
                ok = False
                flags.append("angle %.6f outside (0, pi) in %s"
                             % (folded, list(tet.faces)))
            elif min(folded, math.pi - folded) < margin:
                flags.append("angle %.2e from degeneracy in %s"
                             % (min(folded, math.pi - folded),
                                list(tet.faces)))
            if abs(raw) > math.pi + 1e-9:
                flags.append(
                    "angle %.6f at %s in %s exceeds pi before reduction; "
                    "possible butterfly overlap" % (raw, tet.position_pair(pos),
                                                    list(tet.faces)))
    if solution.multiplicity_note:
        flags.append("%d alternative solutions found; overlap not excluded"
                     % len(solution.multiplicity_note))
    return {"ok": ok, "flags": flags, "details": details}
