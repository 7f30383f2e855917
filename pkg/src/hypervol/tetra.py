"""Generalised hyperbolic tetrahedra.

A shape is six edge parameters attached to the six face pairs of a
tetrahedron, positions 0..5 in the Gram labeling

    position   0      1      2      3      4      5
    face pair (0,1)  (0,2)  (1,2)  (2,3)  (1,3)  (0,3)

(opposite-edge position pairs: (0,3), (1,4), (2,5)).  An edge either carries
a dihedral angle alpha in (0, pi), encoded a = exp(i alpha), or is the common
perpendicular of length ell > 0 between an ultra-parallel face pair, encoded
a = exp(-ell).  Volumes come from an eight-dilogarithm potential evaluated at
the two roots of an associated quadratic; the truncation type records which
positions are perpendiculars, up to the 24 relabelings of the tetrahedron.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from itertools import permutations

import numpy as np

from .numerics import dilog

__all__ = [
    "ANGLE",
    "LENGTH",
    "EdgeParameter",
    "TetrahedronShape",
    "TruncationType",
    "UnsupportedTypeError",
    "NotRealizableError",
    "DegenerateShapeError",
    "BranchCutError",
    "classify",
    "gram_matrix",
    "gram_signature",
    "check_realizable",
    "q_coefficients",
    "z_roots",
    "u_function",
    "v_function",
    "volume",
    "edge_envelope_terms",
    "angle_at_length_edge",
    "length_at_angle_edge",
    "angle_jacobian",
]

ANGLE = "angle"
LENGTH = "length"

POSITION_PAIRS = ((0, 1), (0, 2), (1, 2), (2, 3), (1, 3), (0, 3))
PAIR_TO_POSITION = {pair: k for k, pair in enumerate(POSITION_PAIRS)}
OPPOSITE_POSITION_PAIRS = ((0, 3), (1, 4), (2, 5))

# index sets of the four "quadrilateral" monomials u_m (u_0 is the empty
# product 1) and the four "vertex" monomials w_m in the potential
QUAD_MONOMIALS = ((), (0, 1, 3, 4), (0, 2, 3, 5), (1, 2, 4, 5))
VERTEX_MONOMIALS = ((0, 1, 2), (0, 4, 5), (1, 3, 5), (2, 3, 4))

# which monomials each position enters (always two of each kind)
_QUAD_OF = tuple(tuple(m for m, mon in enumerate(QUAD_MONOMIALS) if k in mon)
                 for k in range(6))
_VERT_OF = tuple(tuple(m for m, mon in enumerate(VERTEX_MONOMIALS) if k in mon)
                 for k in range(6))


class UnsupportedTypeError(ValueError):
    """Length-position pattern is not one of the six supported types."""


class NotRealizableError(ValueError):
    """Gram matrix does not have hyperbolic signature (3,1)."""


class DegenerateShapeError(ValueError):
    """The root quadratic degenerates (leading coefficient vanishes)."""


class BranchCutError(ValueError):
    """A dilogarithm argument landed exactly on the cut [1, oo)."""


@dataclass(frozen=True)
class EdgeParameter:
    """One edge slot: kind 'angle' (value in (0, pi)) or 'length' (value > 0)."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind == ANGLE:
            if not (0.0 < self.value < math.pi):
                raise ValueError("angle must lie in (0, pi), got %r" % (self.value,))
        elif self.kind == LENGTH:
            if not self.value > 0.0:
                raise ValueError("length must be positive, got %r" % (self.value,))
        else:
            raise ValueError("kind must be 'angle' or 'length', got %r" % (self.kind,))

    @staticmethod
    def angle(alpha):
        return EdgeParameter(ANGLE, float(alpha))

    @staticmethod
    def length(ell):
        return EdgeParameter(LENGTH, float(ell))

    @property
    def param(self):
        """The complex parameter a: exp(i alpha) or exp(-ell)."""
        if self.kind == ANGLE:
            return complex(math.cos(self.value), math.sin(self.value))
        return complex(math.exp(-self.value))


@dataclass(frozen=True)
class TetrahedronShape:
    params: tuple

    def __post_init__(self):
        if len(self.params) != 6:
            raise ValueError("need exactly six edge parameters")
        object.__setattr__(self, "params", tuple(self.params))

    @staticmethod
    def regular(alpha):
        return TetrahedronShape(tuple(EdgeParameter.angle(alpha) for _ in range(6)))

    @property
    def length_positions(self):
        return frozenset(k for k, p in enumerate(self.params) if p.kind == LENGTH)

    def with_value(self, position, value):
        """Same shape with the value at one position replaced (kind kept)."""
        ps = list(self.params)
        ps[position] = EdgeParameter(ps[position].kind, float(value))
        return TetrahedronShape(tuple(ps))

    def relabel(self, perm):
        """Apply an induced position permutation (perm[old] = new)."""
        ps = [None] * 6
        for old in range(6):
            ps[perm[old]] = self.params[old]
        return TetrahedronShape(tuple(ps))


class TruncationType(Enum):
    """Which positions carry perpendiculars, in the canonical labeling."""

    MILD = ("Mild", frozenset())
    P4 = ("P4", frozenset({3}))
    P14 = ("P14", frozenset({0, 3}))
    P56 = ("P56", frozenset({4, 5}))
    P456 = ("P456", frozenset({3, 4, 5}))
    P2356 = ("P2356", frozenset({1, 2, 4, 5}))

    @property
    def tag(self):
        return self.value[0]

    @property
    def canonical_positions(self):
        return self.value[1]


def _induced_position_permutations():
    out = []
    for s in permutations(range(4)):
        pi = [0] * 6
        for pos, (i, j) in enumerate(POSITION_PAIRS):
            x, y = s[i], s[j]
            pi[pos] = PAIR_TO_POSITION[(x, y) if x < y else (y, x)]
        out.append(tuple(pi))
    return tuple(out)


POSITION_SYMMETRIES = _induced_position_permutations()


def _describe_pattern(lengths):
    n = len(lengths)
    if n >= 5:
        return "%d Length edges" % n
    if n == 3:
        faces = set()
        for k in lengths:
            faces.update(POSITION_PAIRS[k])
        if len(faces) == 3:
            return "three Length edges meeting at a vertex"
        return "three Length edges forming a path"
    if n == 4:
        return "four Length edges not forming a four-cycle"
    return "Length positions %s" % (sorted(lengths),)


def classify(shape):
    """Truncation type of the shape plus the relabeling that canonicalizes it.

    Returns (ttype, relabel) where relabel[new_position] = old_position, so
    [shape.params[relabel[k]] for k in range(6)] has its Length edges exactly
    at ttype.canonical_positions.
    """
    lengths = shape.length_positions
    for ttype in TruncationType:
        canon = ttype.canonical_positions
        if len(canon) != len(lengths):
            continue
        for perm in POSITION_SYMMETRIES:
            if frozenset(perm[k] for k in lengths) == canon:
                relabel = tuple(perm.index(n) for n in range(6))
                return ttype, relabel
    raise UnsupportedTypeError(
        "unsupported Length-edge pattern: %s" % _describe_pattern(lengths))


def gram_matrix(shape):
    """4x4 real Gram matrix: unit diagonal, entry (i,j) = -(a + 1/a)/2,
    i.e. -cos(alpha) for Angle edges and -cosh(ell) for Length edges."""
    g = np.eye(4)
    for k, (i, j) in enumerate(POSITION_PAIRS):
        p = shape.params[k]
        if p.kind == ANGLE:
            c = -math.cos(p.value)
        else:
            c = -math.cosh(p.value)
        g[i, j] = g[j, i] = c
    return g


def gram_signature(gram, tol=1e-9):
    ev = np.linalg.eigvalsh(gram)
    return int(np.sum(ev > tol)), int(np.sum(ev < -tol))


def check_realizable(shape, tol=1e-9):
    """Signature (3,1) or its flat limit (3,0 plus a zero eigenvalue)."""
    pos, neg = gram_signature(gram_matrix(shape), tol)
    if pos == 3 and neg <= 1:
        return
    raise NotRealizableError(
        "Gram signature (%d,%d) is not hyperbolic (3,1)" % (pos, neg))


# ---------------------------------------------------------------------------
# potential, roots, volume
# ---------------------------------------------------------------------------

def _params_array(shape):
    return np.array([p.param for p in shape.params])


def _monomials(a):
    u = np.array([np.prod(a[list(m)]) for m in QUAD_MONOMIALS])
    w = np.array([np.prod(a[list(m)]) for m in VERTEX_MONOMIALS])
    return u, w


def _build_q_terms():
    # each coefficient as a signed sum of monomials prod a_k^{e_k}
    def vec(idx):
        v = np.zeros(6, dtype=int)
        for k in idx:
            v[k] = 1
        return v

    eye = np.eye(6, dtype=int)
    ones = np.ones(6, dtype=int)
    q0 = [(1.0, vec(m)) for m in QUAD_MONOMIALS + VERTEX_MONOMIALS]
    q1 = []
    for i, j in OPPOSITE_POSITION_PAIRS:
        for si, sj, c in ((1, 1, -1.0), (1, -1, 1.0), (-1, 1, 1.0), (-1, -1, -1.0)):
            q1.append((c, ones + si * eye[i] + sj * eye[j]))
    q2_sets = ((0, 3), (1, 4), (2, 5), (0, 1, 5), (0, 2, 4), (1, 2, 3),
               (3, 4, 5), (0, 1, 2, 3, 4, 5))
    q2 = [(1.0, ones + vec(s)) for s in q2_sets]
    return q0, q1, q2


_Q_TERMS = _build_q_terms()


def q_coefficients(shape):
    """Coefficients (q0, q1, q2) of the root quadratic q0 + q1 z + q2 z^2."""
    a = _params_array(shape)
    out = []
    for terms in _Q_TERMS:
        out.append(complex(sum(c * np.prod(a ** e) for c, e in terms)))
    return tuple(out)


def z_roots(shape):
    """The two stationary points (z_minus, z_plus) of the potential,
    i.e. the roots (-q1 -+ sqrt(q1^2 - 4 q0 q2)) / (2 q2) with the principal
    branch of the square root.

    This labeling is purely algebraic.  The discriminant winds around the
    origin along natural shape families, so no fixed branch rule can track
    the geometric root pair globally; the evaluation layer reorients the
    pair per shape (see _oriented_core).
    """
    q0, q1, q2 = q_coefficients(shape)
    scale = max(1.0, abs(q0), abs(q1))
    if abs(q2) < 1e-13 * scale:
        raise DegenerateShapeError("leading coefficient q2 vanishes")
    disc = q1 * q1 - 4.0 * q0 * q2
    if disc == 0:
        warnings.warn("double root of the z quadratic (flat boundary case)",
                      RuntimeWarning, stacklevel=2)
    s = cmath.sqrt(disc)
    return (-q1 - s) / (2.0 * q2), (-q1 + s) / (2.0 * q2)


def _u_value(u, w, z):
    total = 0j
    for x in u:
        total += dilog(x * z)
    for x in w:
        total -= dilog(-x * z)
    return total


def u_function(shape, z):
    """The eight-term dilogarithm potential at the point z."""
    a = _params_array(shape)
    u, w = _monomials(a)
    args = [x * z for x in u] + [-x * z for x in w]
    for idx, t in enumerate(args):
        if t.imag == 0.0 and t.real > 1.0:
            raise BranchCutError(
                "dilog argument %r of term %d lies on the cut [1, oo)" % (t, idx))
    return sum(dilog(t) for t in args[:4]) - sum(dilog(t) for t in args[4:])


def _g_value(u, w, z):
    # z * d/dz of the potential; exp of this is 1 at the roots
    return complex(-np.sum(np.log(1.0 - u * z)) + np.sum(np.log(1.0 + w * z)))


def _p_value(u, w, z):
    val = _u_value(u, w, z)
    if abs(z - 1.0) < 1e-14:
        # the log z factor kills the (logarithmically divergent) prefactor
        return val
    return val - _g_value(u, w, z) * cmath.log(z)


def _s_value(u, w, z, k):
    # a_k dU/da_k: only the four monomials containing position k contribute
    t = 0j
    for m in _QUAD_OF[k]:
        t -= cmath.log(1.0 - u[m] * z)
    for m in _VERT_OF[k]:
        t += cmath.log(1.0 + w[m] * z)
    return t


def _oriented_core(shape):
    """(V, envelope terms, volume, sign) under the geometric root labeling.

    Swapping the two roots of the quadratic negates V and every envelope
    term at once, so the volume expression only changes sign.  The geometric
    labeling is the one making it nonnegative; that single calibration is
    verified externally (Klein-model integration oracle in the test suite)
    and also propagates the right signs to recovered angles and lengths.
    """
    zm, zp = z_roots(shape)
    u, w = _monomials(_params_array(shape))
    v = 0.25j * (_p_value(u, w, zm) - _p_value(u, w, zp))
    terms = np.array([0.25j * (_s_value(u, w, zm, k) - _s_value(u, w, zp, k))
                      for k in range(6)])
    total = (-v).real
    for k in shape.length_positions:
        total -= shape.params[k].value * terms[k].real
    if total < 0.0:
        return -v, -terms, -total, -1.0
    return v, terms, total, 1.0


def v_function(shape):
    """(i/4) [P(z_minus) - P(z_plus)] with P = U - (z dU/dz) log z,
    under the geometric root labeling."""
    return _oriented_core(shape)[0]


def edge_envelope_terms(shape):
    """a_k dV/da_k for all six positions, geometric labeling.

    By stationarity the root motion drops out (z dU/dz is a constant multiple
    of 2 pi i along each root branch), so only the explicit a-dependence of
    the potential survives.
    """
    return _oriented_core(shape)[1]


def volume(shape):
    """Hyperbolic volume: Re(-V + sum over Length positions of T_k log a_k).

    The correction sum runs over the actual Length positions; classify is
    still consulted so unsupported patterns fail loudly, and realizability
    is enforced through the Gram signature.
    """
    classify(shape)
    check_realizable(shape)
    return _oriented_core(shape)[2]


def angle_at_length_edge(shape, position, fold=True):
    """Dihedral angle along the perpendicular at a Length position.

    The raw value is 2 Re(a_k dV/da_k); with fold=True it is reduced mod pi
    into [0, pi).  The folded value is the geometric dihedral angle (checked
    against a Klein-model oracle); the raw one is kept for diagnosing shapes
    whose wedge leaves the principal range.
    """
    if shape.params[position].kind != LENGTH:
        raise ValueError("position %d is not a Length edge" % position)
    t = edge_envelope_terms(shape)[position]
    raw = 2.0 * t.real
    if not fold:
        return raw
    return raw % math.pi


def length_at_angle_edge(shape, position):
    """Edge length recovered at an Angle position, -2 Im(a_k dV/da_k)."""
    if shape.params[position].kind != ANGLE:
        raise ValueError("position %d is not an Angle edge" % position)
    t = edge_envelope_terms(shape)[position]
    return -2.0 * t.imag


def angle_jacobian(shape, positions=None):
    """Matrix of d(raw angle at position i) / d(length at position j).

    Differentiates through the root motion: dz/da_j from the quadratic by
    implicit differentiation, which avoids tracking square-root branches.
    """
    if positions is None:
        positions = sorted(shape.length_positions)
    positions = list(positions)
    a = _params_array(shape)
    u, w = _monomials(a)
    q0, q1, q2 = q_coefficients(shape)
    zm, zp = z_roots(shape)

    # dq[t, j] = a_j dq_t/da_j
    dq = np.zeros((3, 6), dtype=complex)
    for t, terms in enumerate(_Q_TERMS):
        for c, e in terms:
            dq[t] += (c * np.prod(a ** e)) * e

    jac = np.zeros((len(positions), len(positions)))
    for sign, z in ((1.0, zm), (-1.0, zp)):
        denom = q1 + 2.0 * q2 * z
        zdot = -(dq[0] + dq[1] * z + dq[2] * z * z) / denom  # a_j dz/da_j
        one_m_uz = 1.0 - u * z
        one_p_wz = 1.0 + w * z
        for ii, i in enumerate(positions):
            ds_dz = (sum(u[m] / one_m_uz[m] for m in _QUAD_OF[i])
                     + sum(w[m] / one_p_wz[m] for m in _VERT_OF[i]))
            for jj, j in enumerate(positions):
                expl = 0j
                for m in _QUAD_OF[i]:
                    if j in QUAD_MONOMIALS[m]:
                        expl += u[m] * z / one_m_uz[m]
                for m in _VERT_OF[i]:
                    if j in VERTEX_MONOMIALS[m]:
                        expl += w[m] * z / one_p_wz[m]
                d_ij = expl + ds_dz * zdot[j]
                # d alpha_i / d ell_j = -2 Re(a_j dT_i/da_j)
                jac[ii, jj] += -2.0 * (0.25j * sign * d_ij).real
    return _oriented_core(shape)[3] * jac
