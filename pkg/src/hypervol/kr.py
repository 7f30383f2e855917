"""Quantum 6j-symbols at q = exp(4*pi*i/r) and spin-network growth rates.

The quantum side of the package: Racah-Wigner 6j-symbols over the
normalized quantum integers [n] = {n}/{1}, the closed pentagonal-prism
spin network, recoupling evaluation of colored skeleta along the same
I-H/cap reduction traces the geometric solver uses, and the growth
sequences V(r) = 2*pi*log|value|/r that the volume conjecture compares
against hyperbolic volumes.

Everything is returned in log-magnitude/phase form (LogComplex): the
invariants grow like exp(r*Vol/2pi) and overflow doubles near r ~ 1500.
The network sums cancel exponentially (their terms are far larger than
the result), so those run under mpmath at adaptive precision; the
single-symbol scans stay in fast float arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath as mp
import numpy as np

from .graph import POSITION_PAIRS, DegenerateMoveError, reduce_graph
from .numerics import InvalidLevelError, LogComplex

__all__ = [
    "CalibrationError",
    "ColoringError",
    "GrowthSeries",
    "Level",
    "SixJArgs",
    "admissible",
    "coloring_sequence",
    "doubly_truncated_sum",
    "evaluate_network",
    "evaluate_network_log",
    "growth_point",
    "growth_series",
    "prism_colors",
    "prism_invariant",
    "prism_invariant_log",
    "single_sixj_scan",
    "sixj",
    "sixj_log",
]


class ColoringError(ValueError):
    """A requested coloring is not integral (or not admissible) at this r."""


class CalibrationError(RuntimeError):
    """Network evaluation disagrees with the closed prism form."""


_LEVELS = {}


class Level:
    """Immutable tables of normalized quantum integers at odd level r.

    [n] = {n}/{1} = sin(2 pi n / r) / sin(2 pi / r); the factorial tables
    hold log|[n]!| and the count of negative factors for n = 0 .. r-1.
    For odd r the only zero in range is [r] = 0; factorials with argument
    >= r vanish identically and are returned as the zero LogComplex.
    """

    __slots__ = ("r", "_qint", "_log_fact", "_neg_fact")

    def __init__(self, r):
        if not isinstance(r, int) or r < 3 or r % 2 == 0:
            raise InvalidLevelError(
                "level must be an odd integer >= 3, got %r" % (r,))
        self.r = r
        n = np.arange(r + 1)
        s1 = math.sin(2.0 * math.pi / r)
        vals = np.sin(2.0 * math.pi * n / r) / s1
        vals[r] = 0.0  # exact zero at the level
        self._qint = vals
        body = vals[1:r]
        self._log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.abs(body)))))
        self._neg_fact = np.concatenate(([0], np.cumsum(body < 0.0)))

    def qint(self, n):
        """[n] as a float; defined for 0 <= n <= r."""
        return float(self._qint[n])

    def fact(self, n):
        """[n]! as a LogComplex (real: phase is a multiple of pi)."""
        if n < 0:
            raise ValueError("negative factorial argument %d" % n)
        if n >= self.r:
            return LogComplex.zero()
        return LogComplex(float(self._log_fact[n]),
                          math.pi * int(self._neg_fact[n]))

    def brace_ratio(self, num, den):
        """{num}/{den} = sin(2 pi num / r) / sin(2 pi den / r)."""
        return (math.sin(2.0 * math.pi * num / self.r)
                / math.sin(2.0 * math.pi * den / self.r))


def level(r):
    """Shared Level instance for r (tables are immutable)."""
    if r not in _LEVELS:
        _LEVELS[r] = Level(r)
    return _LEVELS[r]


def _as_level(lv):
    return lv if isinstance(lv, Level) else level(int(lv))


def admissible(a, b, c, r):
    """Triangle inequalities plus the level bound a+b+c <= r-2."""
    return (a >= 0 and b >= 0 and c >= 0
            and abs(a - b) <= c <= a + b
            and a + b + c <= r - 2)


class SixJArgs(NamedTuple):
    """Colors in the display layout: top row (a, b, e), bottom row (d, c, f).

    The triads (a,b,e), (a,c,f), (b,d,f), (c,d,e) must each be admissible
    for a nonzero symbol.  In position terms this is the face-pair order of
    the tetra module: slot i holds the color of the edge between face pair
    POSITION_PAIRS[i] of a tetrahedron graph, so opposite 6j entries
    (a,d), (b,c), (e,f) sit on opposite edges.
    """

    a: int
    b: int
    e: int
    d: int
    c: int
    f: int

    def triads(self):
        a, b, e, d, c, f = self
        return ((a, b, e), (a, c, f), (b, d, f), (c, d, e))


def _sum_logcomplex(terms):
    """Sum of LogComplex terms via max-magnitude scaling."""
    finite = [t for t in terms if not t.is_zero]
    if not finite:
        return LogComplex.zero()
    m = max(t.log_mag for t in finite)
    acc = 0j
    for t in finite:
        acc += math.exp(t.log_mag - m) * complex(math.cos(t.phase),
                                                 math.sin(t.phase))
    if acc == 0:
        return LogComplex.zero()
    return LogComplex(m + math.log(abs(acc)), math.atan2(acc.imag, acc.real))


def sixj_log(args, lv):
    """Racah-Wigner 6j-symbol as a LogComplex; exact zero if inadmissible.

    Four triangle coefficients (principal square roots of factorial
    ratios, so a negative radicand contributes a factor i) times the
    alternating Racah sum Sum_z (-1)^z [z+1]! / (prod of seven
    factorials).  The all-zero symbol is exactly 1.  With the loop
    weight {2m+1}/{1} the symbol satisfies the orthogonality identity
    and the pentagon identity with sign (-1)^(R+x) exactly; folding the
    parity (-1)^(sum of the six colors) into the symbol makes both
    identities sign-free, which is the form the network evaluator uses.
    """
    lv = _as_level(lv)
    args = SixJArgs(*args)
    r = lv.r
    for tri in args.triads():
        if not admissible(*tri, r):
            return LogComplex.zero()
    a, b, e, d, c, f = args
    logf = lv._log_fact
    negf = lv._neg_fact
    t_sums = (a + b + e, a + c + f, b + d + f, c + d + e)
    q_sums = (a + b + c + d, a + d + e + f, b + c + e + f)
    pref_log = 0.0
    quarter_turns = 0
    for (x, y, z) in args.triads():
        rad_log = (logf[-x + y + z] + logf[x - y + z] + logf[x + y - z]
                   - logf[x + y + z + 1])
        rad_neg = int(negf[-x + y + z] + negf[x - y + z] + negf[x + y - z]
                      - negf[x + y + z + 1])
        pref_log += 0.5 * rad_log
        quarter_turns += rad_neg % 2
    z_hi = min(min(q_sums), r - 2)
    acc = 0.0
    scale = None
    for z in range(max(t_sums), z_hi + 1):
        term_log = logf[z + 1]
        sign = z + int(negf[z + 1])
        for ts in t_sums:
            term_log -= logf[z - ts]
            sign += int(negf[z - ts])
        for qs in q_sums:
            term_log -= logf[qs - z]
            sign += int(negf[qs - z])
        if scale is None or term_log > scale:
            # rescale the running sum to the new maximum
            if scale is not None:
                acc *= math.exp(scale - term_log)
            scale = term_log
        acc += (-1.0 if sign % 2 else 1.0) * math.exp(term_log - scale)
    if scale is None or acc == 0.0:
        return LogComplex.zero()
    total_log = pref_log + scale + math.log(abs(acc))
    phase = 0.5 * math.pi * quarter_turns + (math.pi if acc < 0.0 else 0.0)
    return LogComplex(total_log, phase)


def sixj(args, lv):
    """The 6j-symbol as a plain complex (may overflow for r >~ 1500)."""
    return sixj_log(args, lv).to_complex()


# ---------------------------------------------------------------------------
# colorings
# ---------------------------------------------------------------------------

def _color_fraction(angle_fraction):
    # s/(r-3) for a dihedral angle f*pi: (1 - f)/2
    return (1 - angle_fraction) / 2


def coloring_sequence(graph, lv):
    """Edge coloring s_e = (r-3)(pi - alpha_e)/(2 pi) as exact integers.

    Raises ColoringError listing the offending edges and the smallest odd
    level at which every color is integral.
    """
    lv = _as_level(lv)
    r = lv.r
    colors = {}
    bad = []
    steps = []
    for e in graph.edge_ids:
        fr = graph.angle(e)
        if fr is None:
            raise ColoringError("edge %d has no dihedral angle" % e)
        s = (r - 3) * _color_fraction(Fraction(fr))
        # (r-3) is even; s integral iff (q/gcd(q-p, q)) divides (r-3)/2
        # for f = p/q
        frac = _color_fraction(Fraction(fr))
        step = 2 * frac.denominator // math.gcd(2, frac.denominator)
        steps.append(step)
        if s.denominator != 1:
            bad.append(e)
        else:
            colors[e] = int(s)
    if bad:
        need = 1
        for step in steps:
            need = need * step // math.gcd(need, step)
        r_min = 3 + need if need % 2 == 0 else 3 + 2 * need
        raise ColoringError(
            "colors are not integers at r = %d for edges %s; "
            "smallest compatible level is r = %d" % (r, bad, r_min))
    return colors


def prism_colors(lv):
    """The three prism colors (top pi/3, vertical 2pi/5, bottom pi/2)."""
    lv = _as_level(lv)
    r = lv.r
    if (r - 3) % 60:
        raise ColoringError(
            "prism coloring needs (r-3) divisible by 60; smallest valid "
            "level >= %d is %d" % (r, r + (-(r - 3)) % 60))
    return (r - 3) // 3, 3 * (r - 3) // 10, (r - 3) // 4


# ---------------------------------------------------------------------------
# adaptive-precision backend
# ---------------------------------------------------------------------------
# The trace calculus sums terms that are exponentially larger than the
# result (the pentagon identity cancels them), so the network sums run
# under mpmath at a precision raised until two passes agree.

_MP_TABLES = {}


def _mp_tables(r):
    """Quantum integers and factorials as mpf lists at the current dps."""
    key = (r, mp.mp.dps)
    got = _MP_TABLES.get(key)
    if got is None:
        s1 = mp.sin(2 * mp.pi / r)
        qi = [mp.sin(2 * mp.pi * n / r) / s1 for n in range(r)]
        fact = [mp.mpf(1)] * r
        for n in range(1, r):
            fact[n] = fact[n - 1] * qi[n]
        got = _MP_TABLES[key] = (qi, fact)
        if len(_MP_TABLES) > 8:
            _MP_TABLES.pop(next(iter(_MP_TABLES)))
    return got


def _mp_sixj(args, r, fact, peak):
    """6j-symbol as an mpc; tracks the largest intermediate in peak[0]."""
    args = SixJArgs(*args)
    for tri in args.triads():
        if not admissible(*tri, r):
            return mp.mpc(0)
    a, b, e, d, c, f = args
    pref = mp.mpc(1)
    for (x, y, z) in args.triads():
        rad = (fact[-x + y + z] * fact[x - y + z] * fact[x + y - z]
               / fact[x + y + z + 1])
        pref *= mp.sqrt(mp.mpc(rad))
    t_sums = (a + b + e, a + c + f, b + d + f, c + d + e)
    q_sums = (a + b + c + d, a + d + e + f, b + c + e + f)
    tot = mp.mpf(0)
    zpeak = mp.mpf(0)
    for z in range(max(t_sums), min(min(q_sums), r - 2) + 1):
        t = fact[z + 1]
        for u in t_sums:
            t /= fact[z - u]
        for u in q_sums:
            t /= fact[u - z]
        zpeak = max(zpeak, abs(t))
        tot += -t if z % 2 else t
    peak[0] = max(peak[0], abs(pref) * zpeak)
    return pref * tot


def _mp_loop_weight(m, r):
    """[2m+1] at the current precision."""
    return mp.sin(2 * mp.pi * (2 * m + 1) / r) / mp.sin(2 * mp.pi / r)


def _close(a, b):
    return (abs(a[0] - b[0]) <= 1e-11 * max(1.0, abs(b[0]))
            and abs(complex(math.cos(a[1]), math.sin(a[1]))
                    - complex(math.cos(b[1]), math.sin(b[1]))) <= 1e-9)


def _mp_eval(build, max_dps=3000):
    """Evaluate build(peak) -> mpc at rising precision; LogComplex result.

    Accepts once two passes agree and the working precision exceeds the
    observed cancellation (peak over result) with headroom.  A sum that
    stays at zero while its terms do not is re-run deeper before it is
    accepted as an exact zero.
    """
    dps = 40
    prev = None
    zero_runs = 0
    while dps <= max_dps:
        with mp.workdps(dps):
            peak = [mp.mpf(0)]
            total = build(peak)
            if peak[0] == 0:
                return LogComplex.zero()
            if total == 0:
                zero_runs += 1
                if zero_runs >= 2:
                    return LogComplex.zero()
                prev = None
                dps = dps * 2 + 50
                continue
            cur = (float(mp.log(abs(total))), float(mp.arg(total)))
            loss = float(mp.log10(peak[0] / abs(total)))
        if loss + 15.0 <= dps and prev is not None and _close(prev, cur):
            return LogComplex(cur[0], cur[1])
        prev = cur if loss + 15.0 <= dps else None
        dps = max(int(loss) + 30, dps + 15)
    raise RuntimeError("cancellation beyond %d digits" % max_dps)


def prism_invariant_log(lv):
    """Closed-form pentagonal-prism network: Sum_k [2k+1] F(k)^5.

    F(k) is the parity-signed 6j with top row (t, t, v) and bottom row
    (b, b, k), where t, v, b color the top, vertical, and bottom edges;
    k runs over every admissible value with the loop weight [2k+1] of
    the summed color (the weight that closes the orthogonality
    identity, so the value matches evaluate_network on any trace).
    The alternating sum cancels exponentially and is evaluated at
    adaptive precision.
    """
    lv = _as_level(lv)
    r = lv.r
    t, v, b = prism_colors(lv)

    def build(peak):
        _, fact = _mp_tables(r)
        tot = mp.mpc(0)
        for k in range(r - 1):
            s = _mp_sixj((t, t, v, b, b, k), r, fact, peak)
            if s == 0:
                continue
            term = _mp_loop_weight(k, r) * s ** 5
            if (v + k) % 2:
                term = -term
            peak[0] = max(peak[0], abs(term))
            tot += term
        return tot

    return _mp_eval(build)


def prism_invariant(lv):
    """The closed prism form as a plain complex (overflows for large r)."""
    return prism_invariant_log(lv).to_complex()


# ---------------------------------------------------------------------------
# network evaluation along reduction traces
# ---------------------------------------------------------------------------


def _network_quads(graph, coloring, trace):
    """Slot tokens (color int or ('var', i)) per reduction quadruple.

    Replays the trace; every move contributes the quadruple of faces it
    detaches and the terminal skeleton contributes its four faces, exactly
    as in the geometric planner.  Slots follow POSITION_PAIRS over the
    sorted quadruple; a slot whose face pair shares an edge of the current
    graph carries that edge's color, and the single missing pair of an I-H
    move receives a fresh summed variable which then rides on the rewired
    edge.
    """
    colors = {int(e): int(c) for e, c in coloring.items()}
    g = graph
    quads = []
    nvars = 0

    def slot_row(quad):
        if len(set(quad)) != 4:
            raise DegenerateMoveError(
                "quadruple %s repeats a face label" % (quad,))
        faces = tuple(sorted(quad, key=str))
        adj = g.adjacency()
        entries = []
        for i, j in POSITION_PAIRS:
            pair = (faces[i], faces[j])
            if pair[0] > pair[1]:
                pair = (pair[1], pair[0])
            shared = adj.get(pair)
            entries.append(colors[shared[0]] if shared else None)
        return entries

    for mv in trace.moves:
        if mv.kind == "ih":
            entries = slot_row(g.ih_faces(mv.target))
            open_slots = [p for p, t in enumerate(entries) if t is None]
            if len(open_slots) != 1:
                raise DegenerateMoveError(
                    "I-H quadruple must open exactly one pair, got %d"
                    % len(open_slots))
            entries[open_slots[0]] = ("var", nvars)
            g = g.apply_ih(mv.target)
            colors[mv.target] = ("var", nvars)
            nvars += 1
        elif mv.kind == "cap":
            entries = slot_row(g.cap_faces(mv.target))
            if any(t is None for t in entries):
                raise DegenerateMoveError(
                    "cap quadruple has a non-adjacent face pair")
            g = g.apply_cap(mv.target)
        else:
            raise ValueError("unknown move kind %r" % (mv.kind,))
        quads.append(tuple(entries))
    entries = slot_row(g.face_labels())
    if any(t is None for t in entries):
        raise DegenerateMoveError("terminal skeleton is not a tetrahedron")
    quads.append(tuple(entries))
    return quads, nvars


def evaluate_network_log(graph, coloring, lv, moves=None):
    """Colored-skeleton invariant as a LogComplex.

    Follows a reduction trace of the graph (the default one, or a `moves`
    script): each quadruple of faces detached by a move contributes one
    trace factor (a 6j-symbol with a parity sign) whose slots are the
    colors on the current shared edges, each I-H move opens one internal
    color summed with loop weight [2m+1], and the terminal skeleton
    contributes a final factor.  The pentagon and orthogonality
    identities of the trace factor make the result independent of the
    chosen trace; on the pentagonal prism it reproduces prism_invariant
    term by term.  Inadmissibly colored networks evaluate to zero.
    """
    lv = _as_level(lv)
    r = lv.r
    verts = graph.vertices()
    edge_ids = graph.edge_ids
    missing = [e for e in edge_ids if e not in coloring]
    if missing:
        raise ColoringError("no colors for edges %s" % (missing,))
    # theta skeleton (two vertices joined by three edges): every admissible
    # coloring evaluates to 1 in the unitary normalization
    if len(verts) == 2 and len(edge_ids) == 3:
        tri = [int(coloring[e]) for e in edge_ids]
        if admissible(tri[0], tri[1], tri[2], r):
            return LogComplex.one()
        return LogComplex.zero()
    graph.validate()
    for v in verts:
        x, y, z = (int(coloring[d >> 1]) for d in v)
        if not admissible(x, y, z, r):
            return LogComplex.zero()
    trace = reduce_graph(graph, moves)
    quads, nvars = _network_quads(graph, coloring, trace)

    def build(peak):
        _, fact = _mp_tables(r)
        memo = {}

        def factor(entries, assign):
            args = tuple(t if isinstance(t, int) else assign[t[1]]
                         for t in entries)
            got = memo.get(args)
            if got is None:
                got = _mp_sixj(args, r, fact, peak)
                if got != 0 and sum(args) % 2:
                    got = -got
                memo[args] = got
            return got

        tot = mp.mpc(0)
        for assign in _assignments(nvars, r):
            t = mp.mpc(1)
            for m in assign:
                t *= _mp_loop_weight(m, r)
            for entries in quads:
                t *= factor(entries, assign)
                if t == 0:
                    break
            if t != 0:
                peak[0] = max(peak[0], abs(t))
                tot += t
        return tot

    return _mp_eval(build)


def _assignments(nvars, r):
    if nvars == 0:
        yield ()
        return
    for head in range(r - 1):
        for rest in _assignments(nvars - 1, r):
            yield (head,) + rest


def evaluate_network(graph, coloring, lv, moves=None):
    """The colored-skeleton invariant as a plain complex."""
    return evaluate_network_log(graph, coloring, lv, moves).to_complex()


# ---------------------------------------------------------------------------
# asymptotic scans
# ---------------------------------------------------------------------------

def single_sixj_scan(lv, k_range=None):
    """Rows (alpha = 4 pi k / r, growth of the all-equal-colors 6j) over k.

    Growth is 2 pi/r * log of the symbol in the raw-quantum-factorial
    gauge (the unit-normalized symbol divided by {1} = 2 sin(2 pi/r));
    the gauge offset vanishes as r grows and this is the normalization
    whose k -> 0 endpoint tends to 0.  Growth is None where the symbol
    vanishes.  The natural comparison curve is the regular-tetrahedron
    volume at dihedral angle |pi - alpha| from the tetra module.
    """
    lv = _as_level(lv)
    r = lv.r
    if k_range is None:
        k_range = range(0, (r - 2) // 3 + 1)
    gauge = math.log(2.0 * math.sin(2.0 * math.pi / r))
    rows = []
    for k in k_range:
        s = sixj_log((k,) * 6, lv)
        alpha = 4.0 * math.pi * k / r
        growth = None if s.is_zero else 2.0 * math.pi * (s.log_mag - gauge) / r
        rows.append((alpha, growth))
    return rows


def doubly_truncated_sum(lv, k, l, odd_only=False):
    """U(k, l) = Sum_j 6j(k,k,k,k,k,j) * {(2j+1)(2l+1)}/{2j+1}.

    j runs over the admissible range (odd j only when `odd_only`); an empty
    range gives 0.  The weight at a j with r | 2j+1 is the continuous
    limit 2l+1.
    """
    lv = _as_level(lv)
    r = lv.r
    terms = []
    for j in range(0, min(2 * k, r - 2 - 2 * k) + 1):
        if odd_only and j % 2 == 0:
            continue
        s = sixj_log((k, k, k, k, k, j), lv)
        if s.is_zero:
            continue
        if (2 * j + 1) % r == 0:
            w = float(2 * l + 1)
        else:
            w = lv.brace_ratio((2 * j + 1) * (2 * l + 1), 2 * j + 1)
        terms.append(s * LogComplex.from_complex(w))
    return _sum_logcomplex(terms).to_complex()


# ---------------------------------------------------------------------------
# growth sequences
# ---------------------------------------------------------------------------

def growth_point(r, value):
    """V(r) = 2 pi log|value| / r; value may be complex or LogComplex."""
    if not isinstance(value, LogComplex):
        value = LogComplex.from_complex(value)
    if value.is_zero:
        return None
    return 2.0 * math.pi * value.log_mag / r


@dataclass(frozen=True)
class GrowthSeries:
    points: tuple               # (r, V(r)) with r strictly increasing, odd
    extrapolated: float = None  # Richardson-style limit estimate
    fit_residual: float = None
    excluded: tuple = ()        # levels whose invariant vanished

    def values(self):
        return tuple(v for _, v in self.points)


def growth_series(pairs):
    """GrowthSeries from (r, invariant value) pairs.

    The extrapolation fits V(r) = V_inf + a*log(r)/r + b/r (dropping the
    log term when only two points are given); it is a diagnostic, not a
    convergence claim.
    """
    points = []
    excluded = []
    for r, value in pairs:
        v = growth_point(r, value)
        if v is None:
            excluded.append(r)
        else:
            points.append((r, v))
    points.sort()
    rs = [r for r, _ in points]
    if len(rs) != len(set(rs)) or any(r % 2 == 0 for r in rs):
        raise ValueError("levels must be distinct odd integers")
    extrapolated = None
    residual = None
    if len(points) >= 2:
        rr = np.array([r for r, _ in points], dtype=float)
        vv = np.array([v for _, v in points])
        cols = [np.ones_like(rr), 1.0 / rr]
        if len(points) >= 3:
            cols.insert(1, np.log(rr) / rr)
        a = np.column_stack(cols)
        coef, res, _, _ = np.linalg.lstsq(a, vv, rcond=None)
        extrapolated = float(coef[0])
        fit = a @ coef
        residual = float(np.max(np.abs(fit - vv)))
    return GrowthSeries(tuple(points), extrapolated, residual,
                        tuple(excluded))
