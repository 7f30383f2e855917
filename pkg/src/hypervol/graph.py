"""Trivalent 1-skeleta of simple polyhedra and their reduction moves.

A skeleton is stored as a rotation system on darts: edge e owns the twin
darts 2e and 2e+1, and sigma maps every dart to the next dart
counterclockwise around its vertex.  Vertices are the sigma-orbits, faces
the orbits of phi(d) = sigma[twin(d)].  Each face carries a persistent
label from the input polyhedron, and each edge may carry a dihedral angle
recorded as an exact rational multiple of pi (a Fraction f meaning f*pi).

Two moves rewrite a skeleton while keeping it trivalent and planar:

* an I-H move on edge e detaches e from its two side faces (which each
  lose a side) and reattaches it between the two end faces (which each
  gain one); no face label is created or destroyed;
* a capping move contracts a triangular face to a single vertex,
  retiring its label and shortening each neighbor by one side.

Reducing a skeleton to the 4-face terminal state and replaying the move
list yields one face quadruple per move plus the terminal quadruple; the
pairs inside a quadruple are classified against the ORIGINAL polyhedron:
a pair sharing an original edge keeps that edge's dihedral angle, any
other pair is ultra-parallel there and gets a shared perpendicular-length
variable keyed by the unordered face pair.
"""

from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass
from fractions import Fraction
import json
import math

from .tetra import (
    EdgeParameter,
    PAIR_TO_POSITION,
    POSITION_PAIRS,
    TetrahedronShape,
    TruncationType,
    UnsupportedTypeError,
    classify,
)

__all__ = [
    "GraphValidationError",
    "MoveError",
    "ReductionStuckError",
    "DegenerateMoveError",
    "Move",
    "PlanarTrivalentGraph",
    "ReductionTrace",
    "PlannedTetrahedron",
    "DecompositionPlan",
    "reduce_graph",
    "plan_from_trace",
    "graph_to_dot",
    "trace_to_dot",
]


class GraphValidationError(ValueError):
    """The dart structure is not a valid simple-polyhedron skeleton."""


class MoveError(ValueError):
    """A move precondition failed (face collapse, terminal graph, ...)."""


class ReductionStuckError(RuntimeError):
    """No legal move found before reaching the terminal tetrahedron."""


class DegenerateMoveError(ValueError):
    """A move produced a quadruple with a repeated face label."""


Move = namedtuple("Move", ["kind", "target"])
Move.ih = classmethod(lambda cls, edge: cls("ih", int(edge)))
Move.cap = classmethod(lambda cls, face: cls("cap", face))


def _twin(d):
    return d ^ 1


def _orbits(mapping):
    seen = set()
    out = []
    for start in sorted(mapping):
        if start in seen:
            continue
        cyc = [start]
        seen.add(start)
        d = mapping[start]
        while d != start:
            cyc.append(d)
            seen.add(d)
            d = mapping[d]
        out.append(tuple(cyc))
    return out


class PlanarTrivalentGraph:
    """Immutable rotation system with face labels and edge angles.

    sigma: dict dart -> next dart counterclockwise at the same vertex.
    face_of: dict dart -> persistent face label (constant on face orbits).
    angles: dict edge id -> Fraction multiple of pi, or None when the
    polyhedron is a combinatorial template without dihedral data.
    """

    def __init__(self, sigma, face_of, angles):
        self._sigma = dict(sigma)
        self._face_of = dict(face_of)
        self._angles = dict(angles)
        self._faces = None
        self._vertices = None

    # -- basic structure ----------------------------------------------------

    @property
    def darts(self):
        return frozenset(self._sigma)

    @property
    def edge_ids(self):
        return tuple(sorted({d >> 1 for d in self._sigma}))

    def sigma(self, d):
        return self._sigma[d]

    def vertices(self):
        if self._vertices is None:
            self._vertices = tuple(_orbits(self._sigma))
        return self._vertices

    def faces(self):
        """label -> boundary darts in cyclic order (phi orbits)."""
        if self._faces is None:
            phi = {d: self._sigma[_twin(d)] for d in self._sigma}
            faces = {}
            for orbit in _orbits(phi):
                labels = {self._face_of[d] for d in orbit}
                if len(labels) != 1:
                    raise GraphValidationError(
                        "face walk %s crosses labels %s" % (orbit, sorted(map(str, labels))))
                faces[labels.pop()] = orbit
            self._faces = faces
        return self._faces

    def face_labels(self):
        return tuple(sorted(self.faces()))

    def face_size(self, label):
        return len(self.faces()[label])

    def edge_face_pair(self, e):
        """The unordered pair of face labels on either side of edge e."""
        a = self._face_of[2 * e]
        b = self._face_of[2 * e + 1]
        return (a, b) if a <= b else (b, a)

    def angle(self, e):
        return self._angles.get(e)

    def angles_complete(self):
        return all(self._angles.get(e) is not None for e in self.edge_ids)

    def adjacency(self):
        """unordered face-label pair -> list of shared edge ids."""
        adj = {}
        for e in self.edge_ids:
            adj.setdefault(self.edge_face_pair(e), []).append(e)
        return adj

    # -- validation ----------------------------------------------------------

    def validate(self):
        sig = self._sigma
        darts = set(sig)
        if set(self._face_of) != darts:
            raise GraphValidationError("face labels must cover every dart")
        for d in darts:
            if _twin(d) not in darts:
                raise GraphValidationError("dart %d lacks its twin" % d)
            if sig[d] not in darts:
                raise GraphValidationError("sigma leaves the dart set")
        for orbit in self.vertices():
            if len(orbit) != 3:
                raise GraphValidationError(
                    "not trivalent: vertex %s has degree %d" % (orbit, len(orbit)))
        faces = self.faces()
        nv = len(self.vertices())
        ne = len(darts) // 2
        nf = len(faces)
        if nv - ne + nf != 2:
            raise GraphValidationError(
                "Euler relation fails: V-E+F = %d-%d+%d != 2" % (nv, ne, nf))
        for label, orbit in faces.items():
            if len(orbit) < 3:
                raise GraphValidationError(
                    "face %s has only %d sides" % (label, len(orbit)))
        for pair, shared in self.adjacency().items():
            if len(shared) > 1:
                raise GraphValidationError(
                    "faces %s and %s share %d edges" % (pair[0], pair[1], len(shared)))
        for e in self.edge_ids:
            a, b = self._face_of[2 * e], self._face_of[2 * e + 1]
            if a == b:
                raise GraphValidationError("edge %d borders face %s twice" % (e, a))
            fr = self._angles.get(e)
            if fr is not None and not (0 < fr < 1):
                raise GraphValidationError(
                    "edge %d angle %s*pi outside (0, pi)" % (e, fr))
        # connectivity via sigma and twin
        seen = {min(darts)}
        stack = [min(darts)]
        while stack:
            d = stack.pop()
            for n in (sig[d], _twin(d)):
                if n not in seen:
                    seen.add(n)
                    stack.append(n)
        if seen != darts:
            raise GraphValidationError("skeleton is not connected")
        return self

    # -- moves ---------------------------------------------------------------

    def _vertex_rotation(self, d):
        """(d, a, b) with sigma: d -> a -> b -> d at d's vertex."""
        a = self._sigma[d]
        b = self._sigma[a]
        if self._sigma[b] != d:
            raise GraphValidationError("vertex of dart %d is not trivalent" % d)
        return d, a, b

    def ih_faces(self, e):
        """(side1, side2, end1, end2) face labels for an I-H move on e.

        side1 contains dart 2e, side2 dart 2e+1; end1 sits at the vertex
        of 2e, end2 at the vertex of 2e+1.
        """
        d, dt = 2 * e, 2 * e + 1
        _, _, b = self._vertex_rotation(d)
        _, _, f = self._vertex_rotation(dt)
        return (self._face_of[d], self._face_of[dt],
                self._face_of[b], self._face_of[f])

    def apply_ih(self, e):
        """Rewire edge e between its two end faces.

        Preconditions: both side faces have >= 4 sides (each loses one),
        the endpoints are distinct vertices, and the end faces are distinct.
        """
        d, dt = 2 * e, 2 * e + 1
        if d not in self._sigma:
            raise MoveError("no edge %s" % e)
        _, a, b = self._vertex_rotation(d)
        _, c, f = self._vertex_rotation(dt)
        if dt in (a, b):
            raise MoveError("edge %d is a loop" % e)
        side1, side2, end1, end2 = self.ih_faces(e)
        faces = self.faces()
        for side in (side1, side2):
            if len(faces[side]) < 4:
                raise MoveError(
                    "I-H move on edge %d would collapse face %s" % (e, side))
        if end1 == end2:
            raise MoveError(
                "I-H move on edge %d has coinciding end face %s" % (e, end1))
        sigma = dict(self._sigma)
        # contract (d a b | dt c f) to the 4-cycle (a b c f), re-expand with
        # the split {b,c} | {f,a}
        sigma[d] = b
        sigma[b] = c
        sigma[c] = d
        sigma[dt] = f
        sigma[f] = a
        sigma[a] = dt
        face_of = dict(self._face_of)
        face_of[d] = end2    # d now runs along the far end face
        face_of[dt] = end1
        angles = dict(self._angles)
        angles[e] = None     # the rewired edge has no dihedral of its own
        return PlanarTrivalentGraph(sigma, face_of, angles)

    def cap_faces(self, label):
        """(label, n1, n2, n3): the triangle and its three neighbor labels."""
        orbit = self.faces()[label]
        if len(orbit) != 3:
            raise MoveError("face %s is not a triangle" % label)
        return (label,) + tuple(self._face_of[_twin(t)] for t in orbit)

    def apply_cap(self, label):
        """Contract triangular face `label` to a vertex, retiring its label."""
        faces = self.faces()
        if label not in faces:
            raise MoveError("no face %s" % label)
        if len(faces) <= 4:
            raise MoveError("capping face %s would leave fewer than 4 faces" % label)
        orbit = faces[label]
        if len(orbit) != 3:
            raise MoveError("face %s is not a triangle" % label)
        t1, t2, t3 = orbit
        for t in orbit:
            if len(faces[self._face_of[_twin(t)]]) <= 3:
                raise MoveError(
                    "capping face %s would collapse neighbor face %s"
                    % (label, self._face_of[_twin(t)]))
        s1, s2, s3 = self._sigma[t1], self._sigma[t2], self._sigma[t3]
        dead = {t1, t2, t3, _twin(t1), _twin(t2), _twin(t3)}
        sigma = {d: nd for d, nd in self._sigma.items() if d not in dead}
        # merged vertex keeps the outgoing darts, reversed orientation
        sigma[s1] = s3
        sigma[s3] = s2
        sigma[s2] = s1
        face_of = {d: l for d, l in self._face_of.items() if d not in dead}
        angles = {e: fr for e, fr in self._angles.items()
                  if e not in {t >> 1 for t in dead}}
        return PlanarTrivalentGraph(sigma, face_of, angles)

    # -- comparison ----------------------------------------------------------

    def canonical_form(self):
        """Label-preserving invariant: each face's cyclic neighbor sequence,
        canonicalized over rotation and reflection."""

        def canon(seq):
            best = None
            for s in (seq, tuple(reversed(seq))):
                for i in range(len(s)):
                    rot = s[i:] + s[:i]
                    if best is None or rot < best:
                        best = rot
            return best

        out = {}
        for label, orbit in self.faces().items():
            nb = tuple(str(self._face_of[_twin(d)]) for d in orbit)
            out[label] = canon(nb)
        return tuple(sorted(out.items(), key=lambda kv: str(kv[0])))

    def is_isomorphic(self, other):
        return self.canonical_form() == other.canonical_form()

    # -- serialization ---------------------------------------------------------

    def to_json_dict(self):
        verts = sorted(self.vertices())
        faces = self.faces()
        doc = {
            "faces": [{"id": label, "label": label} for label in sorted(faces)],
            "vertices": [{"id": i, "half_edges": list(v)}
                         for i, v in enumerate(verts)],
            "edges": [],
        }
        for e in self.edge_ids:
            fr = self._angles.get(e)
            doc["edges"].append({
                "id": e,
                "face_pair": list(self.edge_face_pair(e)),
                "angle": None if fr is None else {"p": fr.numerator,
                                                  "q": fr.denominator},
            })
        return doc

    def to_json(self, indent=None):
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_json_dict(cls, doc):
        sigma = {}
        for v in doc["vertices"]:
            he = v["half_edges"]
            for i, d in enumerate(he):
                if d in sigma:
                    raise GraphValidationError("dart %d listed twice" % d)
                sigma[d] = he[(i + 1) % len(he)]
        edges = {}
        angles = {}
        for rec in doc["edges"]:
            e = rec["id"]
            edges[e] = tuple(rec["face_pair"])
            ang = rec.get("angle")
            angles[e] = None if ang is None else Fraction(ang["p"], ang["q"])
        if set(sigma) != {2 * e + i for e in edges for i in (0, 1)}:
            raise GraphValidationError("vertex darts do not match edge ids")
        labels = [f.get("label", f["id"]) for f in doc["faces"]]
        if len(set(labels)) != len(labels):
            raise GraphValidationError("face labels are not unique")
        # attach labels to face walks by matching boundary edge sets
        by_label = {}
        for rec, label in zip(doc["faces"], labels):
            by_label[label] = {e for e, pair in edges.items()
                               if rec["id"] in pair}
        phi = {d: sigma[_twin(d)] for d in sigma}
        face_of = {}
        for orbit in _orbits(phi):
            boundary = {d >> 1 for d in orbit}
            hits = [l for l, es in by_label.items() if es == boundary]
            if len(hits) != 1:
                raise GraphValidationError(
                    "face walk with edges %s matches labels %s"
                    % (sorted(boundary), hits))
            for d in orbit:
                face_of[d] = hits[0]
        return cls(sigma, face_of, angles).validate()

    @classmethod
    def from_json(cls, text):
        return cls.from_json_dict(json.loads(text))


# ---------------------------------------------------------------------------
# reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReductionTrace:
    moves: tuple
    terminal: PlanarTrivalentGraph

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))


def _default_move(graph):
    """Cap the smallest-label triangle; otherwise the lowest-id legal I-H
    move that creates a triangle (a side face of 4 sides).  When every side
    face is still too large for that (e.g. an all-pentagon skeleton), fall
    back to the legal I-H move with the smallest side face, which works
    toward creating one."""
    faces = graph.faces()
    for label in sorted(faces, key=str):
        if len(faces[label]) == 3:
            return Move.cap(label)
    best = None
    for e in graph.edge_ids:
        side1, side2, end1, end2 = graph.ih_faces(e)
        if end1 == end2:
            continue
        smallest = min(len(faces[side1]), len(faces[side2]))
        if smallest < 4:
            continue
        if smallest == 4:
            return Move.ih(e)
        if best is None or smallest < best[0]:
            best = (smallest, e)
    return None if best is None else Move.ih(best[1])


def apply_move(graph, move):
    if move.kind == "ih":
        return graph.apply_ih(move.target)
    if move.kind == "cap":
        return graph.apply_cap(move.target)
    raise MoveError("unknown move kind %r" % (move.kind,))


def reduce_graph(graph, moves=None):
    """Reduce to the 4-face terminal skeleton and return the trace.

    `moves` may be a user move script (applied verbatim and required to end
    at 4 faces); by default triangles are capped as soon as they appear and
    otherwise the lowest-id triangle-creating I-H move is applied.
    """
    graph.validate()
    if len(graph.faces()) < 4:
        raise GraphValidationError("fewer than 4 faces")
    if moves is not None:
        g = graph
        script = tuple(moves)
        for mv in script:
            g = apply_move(g, mv)
        if len(g.faces()) != 4:
            raise ReductionStuckError(
                "move script ends with %d faces" % len(g.faces()))
        return ReductionTrace(script, g)
    g = graph
    done = []
    while len(g.faces()) > 4:
        mv = _default_move(g)
        if mv is None:
            raise ReductionStuckError(
                "no legal capping or triangle-creating I-H move from faces %s"
                % (sorted(map(str, g.faces())),))
        done.append(mv)
        g = apply_move(g, mv)
    return ReductionTrace(tuple(done), g)


# ---------------------------------------------------------------------------
# decomposition plans
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlannedTetrahedron:
    """One generalised tetrahedron of a decomposition.

    faces: the sorted label quadruple; its positions follow the face-pair
    table of the tetra module applied to slots 0..3 in sorted-label order.
    entries: six (kind, payload) pairs indexed by position, where kind is
    'angle' with a Fraction multiple of pi (or None for templates) or
    'length' with the unordered face pair naming the shared variable.
    """

    faces: tuple
    entries: tuple
    ttype: TruncationType
    relabel: tuple

    @property
    def length_pairs(self):
        return tuple(p for kind, p in self.entries if kind == "length")

    def position_pair(self, pos):
        """Unordered original-face pair meeting at edge position `pos`."""
        i, j = POSITION_PAIRS[pos]
        a, b = self.faces[i], self.faces[j]
        return (a, b) if a <= b else (b, a)

    def shape(self, lengths, angles=None):
        """TetrahedronShape with perpendicular lengths taken from the
        mapping `lengths` (unordered face pair -> positive length).  An
        optional `angles` mapping (face pair -> Fraction of pi or radians)
        overrides the recorded payloads; template plans carry None payloads
        and need it."""
        params = []
        for pos, (kind, payload) in enumerate(self.entries):
            if kind == "length":
                params.append(EdgeParameter.length(lengths[payload]))
                continue
            if angles is not None:
                payload = angles.get(self.position_pair(pos), payload)
            if payload is None:
                raise ValueError("angles required")
            value = (math.pi * payload.numerator / payload.denominator
                     if isinstance(payload, Fraction) else float(payload))
            params.append(EdgeParameter.angle(value))
        return TetrahedronShape(tuple(params))


@dataclass(frozen=True)
class DecompositionPlan:
    tetrahedra: tuple
    variables: tuple  # sorted unordered face pairs carrying a length each

    def type_counts(self):
        out = {}
        for tet in self.tetrahedra:
            out[tet.ttype.tag] = out.get(tet.ttype.tag, 0) + 1
        return out

    def angles_complete(self):
        return all(payload is not None
                   for tet in self.tetrahedra
                   for kind, payload in tet.entries if kind == "angle")


def _quadruple_of(graph, move):
    if move.kind == "ih":
        return graph.ih_faces(move.target)
    if move.kind == "cap":
        return graph.cap_faces(move.target)
    raise MoveError("unknown move kind %r" % (move.kind,))


def _planned_tetrahedron(quad, original_adjacency, original_angles):
    if len(set(quad)) != 4:
        raise DegenerateMoveError("quadruple %s repeats a face label" % (quad,))
    faces = tuple(sorted(quad, key=str))
    entries = [None] * 6
    for pos, (i, j) in enumerate(POSITION_PAIRS):
        pair = (faces[i], faces[j])
        if pair[0] > pair[1]:
            pair = (pair[1], pair[0])
        if pair in original_adjacency:
            entries[pos] = ("angle", original_angles[pair])
        else:
            entries[pos] = ("length", pair)
    probe = TetrahedronShape(tuple(
        EdgeParameter.length(1.0) if kind == "length" else EdgeParameter.angle(1.0)
        for kind, _ in entries))
    try:
        ttype, relabel = classify(probe)
    except UnsupportedTypeError as exc:
        raise UnsupportedTypeError(
            "quadruple %s: %s" % (list(faces), exc)) from exc
    return PlannedTetrahedron(faces, tuple(entries), ttype, relabel)


def plan_from_trace(original, trace):
    """Replay `trace` on `original` and emit the decomposition plan.

    Every move contributes the quadruple of faces it detaches (I-H: the two
    side faces plus the two end faces; cap: the triangle plus its three
    neighbors) and the terminal skeleton contributes its four faces.  Pair
    classification always refers to the original polyhedron.
    """
    adjacency = original.adjacency()
    angles = {}
    for pair, shared in adjacency.items():
        angles[pair] = original.angle(shared[0])
    g = original
    quads = []
    for mv in trace.moves:
        quads.append(_quadruple_of(g, mv))
        g = apply_move(g, mv)
    if g.face_labels() != trace.terminal.face_labels():
        raise MoveError("trace terminal does not match replay")
    quads.append(tuple(g.face_labels()))
    tets = tuple(_planned_tetrahedron(q, adjacency, angles) for q in quads)
    variables = sorted({p for t in tets for p in t.length_pairs},
                       key=lambda p: (str(p[0]), str(p[1])))
    return DecompositionPlan(tets, tuple(variables))


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

def graph_to_dot(graph, name="skeleton"):
    verts = sorted(graph.vertices())
    vid = {}
    for i, orbit in enumerate(verts):
        for d in orbit:
            vid[d] = i
    lines = ["graph %s {" % name, "  node [shape=point];"]
    for label, orbit in sorted(graph.faces().items(), key=lambda kv: str(kv[0])):
        lines.append("  // face %s: %d sides" % (label, len(orbit)))
    for e in graph.edge_ids:
        fr = graph.angle(e)
        tag = "e%d" % e if fr is None else "e%d %s/%spi" % (e, fr.numerator,
                                                            fr.denominator)
        lines.append('  v%d -- v%d [label="%s"];'
                     % (vid[2 * e], vid[2 * e + 1], tag))
    lines.append("}")
    return "\n".join(lines) + "\n"


def trace_to_dot(trace, name="trace"):
    lines = ["digraph %s {" % name, "  node [shape=box];"]
    for i, mv in enumerate(trace.moves):
        lines.append('  s%d -> s%d [label="%s %s"];' % (i, i + 1, mv.kind,
                                                        mv.target))
    lines.append('  s%d [label="terminal %s"];'
                 % (len(trace.moves), list(trace.terminal.face_labels())))
    lines.append("}")
    return "\n".join(lines) + "\n"
