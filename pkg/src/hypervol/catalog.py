"""Built-in polyhedra: skeleta, dihedral angles, and reference volumes.

Every builder returns a PlanarTrivalentGraph whose face labels follow the
figures used throughout the package: pentagonal prisms label their side
quadrilaterals 1..5, the top pentagon 6 and the bottom pentagon 7; the
pleated prism adds the pleat quadrilateral as face 8, wedged between the
side faces 3 and 5 and the bottom face 7 along the lower edge of side 4.

Entries may be overridden or extended by JSON files in the directory named
by the HYPERVOL_CATALOG_DIR environment variable; each file holds
{"name", "expected_volume", "notes", "polyhedron": <skeleton document>}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import json
import os

from .graph import Move, PlanarTrivalentGraph

__all__ = [
    "CatalogEntry",
    "build_tetrahedron",
    "build_pentagonal_prism",
    "build_pleated_prism",
    "build_dodecahedron",
    "catalog",
    "catalog_entry",
    "CATALOG_DIR_ENV",
    "DODECAHEDRON_MOVES",
    "PLEATED_ALTERNATE_MOVES",
    "PRISM_ALTERNATE_MOVES",
]

CATALOG_DIR_ENV = "HYPERVOL_CATALOG_DIR"

# Canonical reduction for the dodecahedral skeleton below.  The default
# cap-first strategy reaches a terminal state but meets a face quadruple
# with an unsupported perpendicular pattern; this script (found by searching
# move sequences whose every quadruple instantiates a supported truncation
# type) decomposes the dodecahedron into 16 generalised tetrahedra of types
# {P4: 6, P56: 6, P456: 2, P2356: 2} over 7 perpendicular variables.
DODECAHEDRON_MOVES = (
    Move("ih", 0), Move("ih", 1), Move("cap", 1), Move("ih", 5),
    Move("cap", 2), Move("ih", 0), Move("ih", 7), Move("cap", 3),
    Move("cap", 8), Move("ih", 8), Move("cap", 5), Move("ih", 1),
    Move("cap", 4), Move("cap", 6), Move("cap", 11),
)

# Alternate reduction of the pleated prism: rewires inside the cube left
# after the first three moves along the 3|6 edge instead of the 6|7 one,
# giving 5 tetrahedra of type P4 plus 2 of type P56 over variables
# {6,7} and {4,7} (the default strategy gives 6 P4 + 1 P14 over {6,7}, {3,5}).
PLEATED_ALTERNATE_MOVES = (
    Move("ih", 0), Move("cap", 1), Move("cap", 2),
    Move("ih", 6), Move("cap", 3), Move("cap", 6),
)

# Alternate reduction of the pentagonal prism starting at a vertical edge
# instead of a base one: 5 tetrahedra of type P4 plus 1 of type P14 over
# variables {6,7} and {1,3} (the default gives 5 P4 over {6,7} alone).
# Exercises plan independence: both must yield the same volume.
PRISM_ALTERNATE_MOVES = (
    Move("ih", 5), Move("cap", 2), Move("ih", 2),
    Move("cap", 3), Move("cap", 1),
)


def _labels_by_min_dart(sigma):
    """Face labels 1..F in increasing order of each walk's smallest dart."""
    phi = {d: sigma[d ^ 1] for d in sigma}
    seen = set()
    orbits = []
    for start in sorted(phi):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        d = phi[start]
        while d != start:
            cyc.append(d)
            seen.add(d)
            d = phi[d]
        orbits.append(cyc)
    face_of = {}
    for label, orbit in enumerate(orbits, start=1):
        for d in orbit:
            face_of[d] = label
    return face_of


def build_tetrahedron(angle=Fraction(1, 3)):
    """K4 skeleton, every edge carrying the same dihedral angle*pi."""
    sigma = {}
    for cycle in ((0, 2, 4), (6, 1, 11), (8, 3, 7), (10, 5, 9)):
        for i, d in enumerate(cycle):
            sigma[d] = cycle[(i + 1) % 3]
    angles = {e: Fraction(angle) for e in range(6)}
    return PlanarTrivalentGraph(sigma, _labels_by_min_dart(sigma), angles).validate()


def _prism_sigma():
    """Rotation system of the pentagonal prism.

    Vertical edge i (top vertex t_i to bottom b_i) has darts 2i / 2i+1,
    top-ring edge 5+i (t_i to t_{i+1}) darts 10+2i / 11+2i, bottom-ring
    edge 10+i (b_i to b_{i+1}) darts 20+2i / 21+2i.
    """
    sigma = {}
    for i in range(5):
        j = (i - 1) % 5
        for cycle in ((10 + 2 * i, 11 + 2 * j, 2 * i),
                      (2 * i + 1, 21 + 2 * j, 20 + 2 * i)):
            for k, d in enumerate(cycle):
                sigma[d] = cycle[(k + 1) % 3]
    return sigma


def build_pentagonal_prism(vertical=Fraction(2, 5), top=Fraction(1, 3),
                           bottom=Fraction(1, 2)):
    """Pentagonal prism; side faces 1..5, top face 6, bottom face 7.

    Side face i+1 contains vertical edges i-1 and i, so vertical edge 0
    runs between side faces 1 and 2.
    """
    sigma = _prism_sigma()
    face_of = {}
    for i in range(5):
        # side quad through vertical i: darts of verticals i-1, i plus the
        # top and bottom ring darts between them
        j = (i - 1) % 5
        for d in (2 * i, 21 + 2 * j, 2 * j + 1, 10 + 2 * j):
            face_of[d] = i + 1
    for i in range(5):
        face_of[11 + 2 * i] = 6
        face_of[20 + 2 * i] = 7
    angles = {}
    for i in range(5):
        angles[i] = None if vertical is None else Fraction(vertical)
        angles[5 + i] = None if top is None else Fraction(top)
        angles[10 + i] = None if bottom is None else Fraction(bottom)
    return PlanarTrivalentGraph(sigma, face_of, angles).validate()


def build_pleated_prism(angles=None):
    """Pentagonal prism with the bottom edge of side face 4 pleated.

    The bottom edge between faces 4 and 7 (edge 12) is pushed inward: the
    two bottom vertices b2, b3 acquire companions n0, n1 below, bounding a
    new quadrilateral face 8 adjacent to faces 3, 4, 5 and 7.  New edges:
    15 (b2-n0), 16 (b3-n1), 17 (n0-n1); edges 11 and 13 are re-anchored to
    n0 and n1.  Face sizes become 4,4,5,4,5,5,5,4.

    `angles` maps edge id -> Fraction multiple of pi; by default the
    skeleton is a template with no dihedral data.
    """
    sigma = _prism_sigma()
    face_of = {}
    for i in range(5):
        j = (i - 1) % 5
        for d in (2 * i, 21 + 2 * j, 2 * j + 1, 10 + 2 * j):
            face_of[d] = i + 1
    for i in range(5):
        face_of[11 + 2 * i] = 6
        face_of[20 + 2 * i] = 7
    # re-anchor: dart 23 (edge 11 at b2) moves to n0, dart 26 (edge 13 at
    # b3) moves to n1; b2, b3 pick up the new down edges instead
    sigma[5], sigma[30], sigma[24] = 30, 24, 5
    sigma[7], sigma[25], sigma[32] = 25, 32, 7
    sigma[31], sigma[23], sigma[34] = 23, 34, 31
    sigma[33], sigma[35], sigma[26] = 35, 26, 33
    for d, label in ((30, 3), (31, 8), (32, 8), (33, 5), (34, 7), (35, 8),
                     (24, 8)):
        face_of[d] = label
    full = dict.fromkeys(range(18))
    if angles:
        for e, fr in angles.items():
            full[int(e)] = None if fr is None else Fraction(fr)
    return PlanarTrivalentGraph(sigma, face_of, full).validate()


def build_dodecahedron(angle=Fraction(1, 2)):
    """Regular dodecahedral skeleton, one dihedral angle on all 30 edges.

    Four rings of five vertices (u outer, then v, w, x) drawn with the
    bottom face outermost; edge ids: bottom ring i, legs 5+i (u_i-v_i),
    10+i (v_i-w_i), 15+i (w_i-v_{i+1}), 20+i (w_i-x_i), top ring 25+i.
    """
    sigma = {}
    for i in range(5):
        j = (i - 1) % 5
        cycles = (
            (2 * i, 10 + 2 * i, 2 * j + 1),            # u_i
            (11 + 2 * i, 20 + 2 * i, 31 + 2 * j),      # v_i
            (30 + 2 * i, 40 + 2 * i, 21 + 2 * i),      # w_i
            (41 + 2 * i, 50 + 2 * i, 51 + 2 * j),      # x_i
        )
        for cycle in cycles:
            for k, d in enumerate(cycle):
                sigma[d] = cycle[(k + 1) % 3]
    angles = {e: None if angle is None else Fraction(angle) for e in range(30)}
    return PlanarTrivalentGraph(sigma, _labels_by_min_dart(sigma), angles).validate()


# ---------------------------------------------------------------------------
# the catalog proper
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogEntry:
    name: str
    builder: object          # () -> graph, or (angle=Fraction) -> graph
    expected_volume: object  # float or None
    notes: str
    parametric: bool = False
    moves: tuple = None      # canonical reduction script, if the default
                             # strategy does not yield a supported plan

    def graph(self, **params):
        return self.builder(**params)

    def to_json_dict(self, **params):
        doc = {
            "name": self.name,
            "expected_volume": self.expected_volume,
            "notes": self.notes,
            "polyhedron": self.graph(**params).to_json_dict(),
        }
        return doc


_BUILTIN = (
    CatalogEntry(
        "prism-235",
        lambda: build_pentagonal_prism(),
        2.63200,
        "pentagonal prism, vertical edges 2pi/5, top pentagon pi/3, "
        "bottom pentagon pi/2",
    ),
    CatalogEntry(
        "dodecahedron-right-angled",
        lambda: build_dodecahedron(Fraction(1, 2)),
        4.30621,
        "compact right-angled dodecahedron",
        moves=DODECAHEDRON_MOVES,
    ),
    CatalogEntry(
        "dodecahedron-pi3",
        lambda: build_dodecahedron(Fraction(1, 3)),
        20.5802,
        "ideal dodecahedron with all dihedral angles pi/3",
        moves=DODECAHEDRON_MOVES,
    ),
    CatalogEntry(
        "tetrahedron-regular",
        lambda angle=Fraction(1, 3): build_tetrahedron(angle),
        None,
        "one-parameter family: all six dihedral angles equal; pass "
        "--angle p/q",
        parametric=True,
    ),
    CatalogEntry(
        "pleated-prism-template",
        lambda: build_pleated_prism(),
        None,
        "combinatorial template only; dihedral angles must be supplied "
        "before volumes can be computed",
    ),
)


def _entry_from_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    graph = PlanarTrivalentGraph.from_json_dict(doc["polyhedron"])
    return CatalogEntry(
        doc["name"],
        lambda g=graph: g,
        doc.get("expected_volume"),
        doc.get("notes", ""),
    )


def catalog():
    """name -> CatalogEntry; HYPERVOL_CATALOG_DIR entries shadow built-ins."""
    entries = {e.name: e for e in _BUILTIN}
    directory = os.environ.get(CATALOG_DIR_ENV)
    if directory:
        for fn in sorted(os.listdir(directory)):
            if fn.endswith(".json"):
                entry = _entry_from_file(os.path.join(directory, fn))
                entries[entry.name] = entry
    return entries


def catalog_entry(name):
    entries = catalog()
    if name not in entries:
        raise KeyError("no catalog entry %r; known: %s"
                       % (name, ", ".join(sorted(entries))))
    return entries[name]
