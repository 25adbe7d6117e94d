"""Oriented simplices with exact vertices, boundary faces, affine face maps.

A Simplex is full-dimensional (n+1 affinely independent points in R^n,
positively oriented).  Faces reference their host simplex through absolute
vertex index tuples and carry their own barycentric frame implicitly: a
form on a face is expressed over the face's vertex positions 0..d, with
the tangent basis given by the d edge vectors out of the first vertex.

Affine maps between faces are stored barycentrically: the matrix M with
lambda_target = M @ lambda_source, whose columns are the target barycentric
coordinates of the mapped source vertices.  Composition, point images and
ambient Jacobians all derive from M exactly.
"""

from __future__ import annotations

import itertools
from math import factorial

from .combinatorics import perm_sign
from .exterior import AltForm
from .linalg import Matrix
from .scalars import ONE, Q, QuadExt, ZERO, scalar_is_zero, scalar_sign


class Simplex:
    """Positively oriented n-simplex with exact vertex coordinates."""

    def __init__(self, vertices, auto_orient: bool = False):
        vertices = [tuple(c if isinstance(c, QuadExt) else Q(c) for c in v) for v in vertices]
        n = len(vertices) - 1
        if n < 0 or any(len(v) != n for v in vertices):
            raise ValueError("need n+1 vertices in R^n")
        self.n = n
        det = _edge_det(vertices)
        s = scalar_sign(det)
        if s == 0:
            raise ValueError("degenerate simplex (zero volume)")
        if s < 0:
            if not auto_orient:
                raise ValueError("negatively oriented simplex; pass auto_orient=True to fix")
            vertices[-1], vertices[-2] = vertices[-2], vertices[-1]
            det = -det
        self.vertices = tuple(vertices)
        self.signed_volume = det / factorial(n) if n > 0 else ONE
        self.volume = self.signed_volume
        self._faces = {}
        self._frame = None

    def __repr__(self):
        return f"Simplex(n={self.n})"

    # identity semantics: two simplices are distinct hosts even with equal vertices
    __hash__ = object.__hash__

    def face(self, sigma) -> "Face":
        sigma = tuple(sigma)
        got = self._faces.get(sigma)
        if got is None:
            got = Face(self, sigma)
            self._faces[sigma] = got
        return got

    @property
    def top(self) -> "Face":
        return self.face(range(self.n + 1))

    def faces(self, dim=None):
        """All faces, or all faces of one dimension, ordered lexicographically."""
        dims = range(self.n + 1) if dim is None else [dim]
        for d in dims:
            for sigma in itertools.combinations(range(self.n + 1), d + 1):
                yield self.face(sigma)

    def frame(self) -> Matrix:
        """Edge vectors v_i - v_0 as columns; invertible by construction."""
        if self._frame is None:
            v0 = self.vertices[0]
            self._frame = Matrix([[self.vertices[j][r] - v0[r] for j in range(1, self.n + 1)]
                                  for r in range(self.n)])
        return self._frame

    def barycentric_gradients(self):
        """The constant 1-forms d-lambda_i, i = 0..n, plus the affine offsets.

        lambda_i(x) = offsets[i] + sum_r gradients[i][r] * x_r, with
        lambda_i(v_j) = delta_ij and sum_i lambda_i = 1.
        """
        if not hasattr(self, "_bary"):
            n = self.n
            a = Matrix([list(v) + [ONE] for v in self.vertices])
            inv = a.inverse()
            gradients = tuple(tuple(inv.entries[r][i] for r in range(n)) for i in range(n + 1))
            offsets = tuple(inv.entries[n][i] for i in range(n + 1))
            self._bary = (gradients, offsets)
        return self._bary

    def barycentric(self, point):
        """Exact barycentric coordinates of an ambient point."""
        gradients, offsets = self.barycentric_gradients()
        point = tuple(point)
        return tuple(offsets[i] + sum((gradients[i][r] * point[r] for r in range(self.n)), ZERO)
                     for i in range(self.n + 1))

    def gradient_forms(self):
        """d-lambda_i as ambient AltForms."""
        gradients, _ = self.barycentric_gradients()
        return [AltForm(self.n, 1, {(r + 1,): g[r] for r in range(self.n)}) for g in gradients]


def _edge_det(vertices):
    n = len(vertices) - 1
    if n == 0:
        return ONE
    v0 = vertices[0]
    m = Matrix([[vertices[j][r] - v0[r] for j in range(1, n + 1)] for r in range(n)])
    return m.det()


class Face:
    """A d-dimensional boundary simplex of a host simplex.

    sigma holds the absolute host vertex indices, strictly increasing; the
    full face (sigma = (0..n)) stands for the simplex itself.
    """

    __slots__ = ("simplex", "sigma")

    def __init__(self, simplex: Simplex, sigma):
        sigma = tuple(sigma)
        if any(a >= b for a, b in zip(sigma, sigma[1:])) or not sigma:
            raise ValueError(f"face indices must be strictly increasing and nonempty: {sigma}")
        if sigma[0] < 0 or sigma[-1] > simplex.n:
            raise ValueError(f"face indices out of range: {sigma}")
        self.simplex = simplex
        self.sigma = sigma

    @property
    def dim(self) -> int:
        return len(self.sigma) - 1

    @property
    def vertices(self):
        return tuple(self.simplex.vertices[i] for i in self.sigma)

    @property
    def is_top(self) -> bool:
        return len(self.sigma) == self.simplex.n + 1

    def __eq__(self, other):
        return (isinstance(other, Face) and other.simplex is self.simplex
                and other.sigma == self.sigma)

    def __hash__(self):
        return hash((id(self.simplex), self.sigma))

    def __repr__(self):
        return f"Face{self.sigma}"

    def subface(self, sigma_abs) -> "Face":
        sigma_abs = tuple(sigma_abs)
        if not set(sigma_abs) <= set(self.sigma):
            raise ValueError(f"{sigma_abs} is not a subface of {self.sigma}")
        return self.simplex.face(sigma_abs)

    def contains(self, other: "Face") -> bool:
        return other.simplex is self.simplex and set(other.sigma) <= set(self.sigma)

    def positions_of(self, other: "Face"):
        """Positions (0..d) of a nested face's vertices within this face."""
        if not self.contains(other):
            raise ValueError(f"{other.sigma} is not nested in {self.sigma}")
        index = {v: p for p, v in enumerate(self.sigma)}
        return tuple(index[v] for v in other.sigma)

    def subfaces(self, dim=None, proper=False):
        dims = range(self.dim + 1) if dim is None else [dim]
        for d in dims:
            for combo in itertools.combinations(self.sigma, d + 1):
                if proper and len(combo) == len(self.sigma):
                    continue
                yield self.simplex.face(combo)

    def facets(self):
        return list(self.subfaces(dim=self.dim - 1)) if self.dim > 0 else []

    def centroid_bary(self):
        w = Q(1, self.dim + 1)
        return tuple(w for _ in self.sigma)

    def centroid_point(self):
        return point_from_bary(self, self.centroid_bary())

    def vertex_bary(self, position: int):
        return tuple(ONE if p == position else ZERO for p in range(self.dim + 1))


def point_from_bary(face: Face, bary):
    verts = face.vertices
    n = face.simplex.n
    return tuple(sum((bary[i] * verts[i][r] for i in range(len(verts))), ZERO) for r in range(n))


class AffineFaceMap:
    """Affine map between faces, stored as its barycentric matrix.

    matrix[t][s] is the t-th target barycentric coordinate of the image of
    the s-th source vertex; every column sums to one.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: Face, target: Face, matrix):
        matrix = tuple(tuple(row) for row in matrix)
        if len(matrix) != target.dim + 1 or any(len(r) != source.dim + 1 for r in matrix):
            raise ValueError("barycentric matrix shape mismatch")
        self.source = source
        self.target = target
        self.matrix = matrix

    def __repr__(self):
        return f"AffineFaceMap({self.source}->{self.target})"

    def map_bary(self, bary):
        return tuple(sum((row[s] * bary[s] for s in range(len(bary))), ZERO)
                     for row in self.matrix)

    def map_point(self, bary):
        """Ambient image of the source point with the given barycentric coords."""
        return point_from_bary(self.target, self.map_bary(bary))

    def compose(self, inner: "AffineFaceMap") -> "AffineFaceMap":
        """self after inner."""
        if inner.target is not self.source and inner.target != self.source:
            raise ValueError("composition mismatch")
        m = Matrix(self.matrix).matmul(Matrix(inner.matrix))
        return AffineFaceMap(inner.source, self.target, m.entries)

    def jacobian(self) -> Matrix:
        """Ambient derivative; both faces must be full-dimensional."""
        if not (self.source.is_top and self.target.is_top):
            raise ValueError("ambient Jacobian needs full-dimensional faces")
        src = self.source.simplex
        tgt = self.target.simplex
        grads, _ = src.barycentric_gradients()
        w = Matrix([[v[r] for v in tgt.vertices] for r in range(tgt.n)])
        dl = Matrix([list(g) for g in grads])
        return w.matmul(Matrix(self.matrix)).matmul(dl)


def identity_map(face: Face) -> AffineFaceMap:
    return AffineFaceMap(face, face, Matrix.identity(face.dim + 1).entries)


def vertex_map(source: Simplex, target: Simplex) -> AffineFaceMap:
    """The affine bijection sending the i-th source vertex to the i-th target vertex."""
    if source.n != target.n:
        raise ValueError("dimension mismatch")
    return AffineFaceMap(source.top, target.top, Matrix.identity(source.n + 1).entries)


def inclusion(sub: Face, sup: Face) -> AffineFaceMap:
    pos = sup.positions_of(sub)
    rows = [[ONE if (s < len(pos) and pos[s] == t) else ZERO for s in range(sub.dim + 1)]
            for t in range(sup.dim + 1)]
    return AffineFaceMap(sub, sup, rows)


def centroid_projector(sup: Face, sub: Face) -> AffineFaceMap:
    """Fixes sub's vertices; sends every other vertex of sup to sub's centroid."""
    pos = {v: q for q, v in enumerate(sub.sigma)}
    w = Q(1, sub.dim + 1)
    cols = []
    for v in sup.sigma:
        if v in pos:
            cols.append([ONE if t == pos[v] else ZERO for t in range(sub.dim + 1)])
        else:
            cols.append([w] * (sub.dim + 1))
    rows = [[cols[s][t] for s in range(sup.dim + 1)] for t in range(sub.dim + 1)]
    return AffineFaceMap(sup, sub, rows)


def weighted_projector(sup: Face, sub: Face, alpha) -> AffineFaceMap:
    """Like the centroid projector, but off-face vertices go to the weighted
    vertex average with weights alpha/|alpha| over sub's vertices."""
    alpha = tuple(alpha)
    if len(alpha) != sub.dim + 1:
        raise ValueError("weight multi-index must match the target face")
    total = sum(alpha)
    if total <= 0 or any(a < 0 for a in alpha):
        raise ValueError("weights must be nonnegative with positive sum")
    pos = {v: q for q, v in enumerate(sub.sigma)}
    weights = [Q(a, total) for a in alpha]
    cols = []
    for v in sup.sigma:
        if v in pos:
            cols.append([ONE if t == pos[v] else ZERO for t in range(sub.dim + 1)])
        else:
            cols.append(list(weights))
    rows = [[cols[s][t] for s in range(sup.dim + 1)] for t in range(sub.dim + 1)]
    return AffineFaceMap(sup, sub, rows)


def match_map(source: Face, target: Face) -> AffineFaceMap:
    """Identify two faces (possibly of different hosts) sharing vertex coordinates."""
    if source.dim != target.dim:
        raise ValueError("dimension mismatch")
    tpos = {}
    for q, v in enumerate(target.sigma):
        tpos[target.simplex.vertices[v]] = q
    rows = [[ZERO] * (source.dim + 1) for _ in range(target.dim + 1)]
    for s, v in enumerate(source.sigma):
        coord = source.simplex.vertices[v]
        if coord not in tpos:
            raise ValueError("faces do not share vertex coordinates")
        rows[tpos[coord]][s] = ONE
    return AffineFaceMap(source, target, rows)


def oriented_volume_form_coefficient(simplex: Simplex, pi, omit: int):
    """Exact check data for the positively-oriented wedge identity.

    Returns (wedge of d-lambda_{pi(j)}, j != omit, as an AltForm;
    the predicted multiple of the volume form).
    """
    pi = tuple(pi)
    dl = simplex.gradient_forms()
    seq = [pi[j] for j in range(len(pi)) if j != omit]
    form = AltForm.unit(simplex.n, ())
    for i in seq:
        form = form.wedge(dl[i])
    scale = Q(perm_sign(pi) * (-1) ** omit, factorial(simplex.n)) / simplex.volume
    predicted = AltForm.volume(simplex.n).scale(scale)
    return form, predicted


def reference_simplex(n: int) -> Simplex:
    verts = [tuple(ZERO for _ in range(n))]
    for i in range(n):
        verts.append(tuple(ONE if r == i else ZERO for r in range(n)))
    return Simplex(verts)


def random_rational_simplex(n: int, rng, max_den: int = 8, spread: int = 3) -> Simplex:
    """Seeded nondegenerate positively oriented simplex with small rational vertices."""
    while True:
        verts = [tuple(Q(rng.randint(-spread, spread), rng.randint(1, max_den))
                       for _ in range(n)) for _ in range(n + 1)]
        det = _edge_det([tuple(v) for v in verts])
        if scalar_is_zero(det):
            continue
        if scalar_sign(det) < 0:
            verts[-1], verts[-2] = verts[-2], verts[-1]
        return Simplex(verts)
