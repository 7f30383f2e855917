"""Shared helpers for sampling realizable tetrahedron shapes in tests."""

import math

import numpy as np

from hypervol.tetra import (
    EdgeParameter,
    NotRealizableError,
    TetrahedronShape,
    TruncationType,
    check_realizable,
    z_roots,
)

TYPE_LENGTH_SETS = {t: sorted(t.canonical_positions) for t in TruncationType}


def make_shape(length_positions, values):
    params = []
    for k in range(6):
        if k in length_positions:
            params.append(EdgeParameter.length(values[k]))
        else:
            params.append(EdgeParameter.angle(values[k]))
    return TetrahedronShape(tuple(params))


def random_shape(rng, ttype, max_tries=4000, root_gap=1e-4):
    """Rejection-sample a realizable shape of the given truncation type.

    Keeps shapes whose two z roots are comfortably distinct and away from 1,
    so finite-difference derivative checks behave.
    """
    lengths = TYPE_LENGTH_SETS[ttype]
    for _ in range(max_tries):
        vals = np.empty(6)
        for k in range(6):
            if k in lengths:
                vals[k] = rng.uniform(0.15, 1.3)
            else:
                lo, hi = (0.34, 0.39) if not lengths else (0.25, 0.48)
                vals[k] = rng.uniform(lo * math.pi, hi * math.pi)
        shape = make_shape(lengths, vals)
        try:
            check_realizable(shape)
            zm, zp = z_roots(shape)
        except (NotRealizableError, ValueError):
            continue
        if abs(zm - zp) < root_gap:
            continue
        if min(abs(zm - 1.0), abs(zp - 1.0)) < 1e-3:
            continue
        return shape
    raise RuntimeError("could not sample a realizable %s shape" % ttype.tag)


def prism_cut_shape(ell):
    """The one-parameter family cut from a pentagonal prism: the length edge
    separates the prism's top and bottom faces, the five angles are the
    prism dihedrals 2pi/5, pi/3, pi/3, pi/2, pi/2."""
    params = (
        EdgeParameter.angle(2 * math.pi / 5),
        EdgeParameter.angle(math.pi / 3),
        EdgeParameter.angle(math.pi / 3),
        EdgeParameter.length(ell),
        EdgeParameter.angle(math.pi / 2),
        EdgeParameter.angle(math.pi / 2),
    )
    return TetrahedronShape(params)


def bisect_scalar(f, lo, hi, tol=1e-13, max_iter=200):
    flo, fhi = f(lo), f(hi)
    assert flo * fhi < 0, "no sign change on [%g, %g]" % (lo, hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)
