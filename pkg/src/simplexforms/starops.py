"""Barycentric star operators and their derived machinery.

Two stars live here.  The algebraic one acts on constant forms of one
simplex and carries the 1/sqrt(n+1) normalization, so its outputs live in
the quadratic extension field.  The pointwise one multiplies each summand
by the complementary bubble monomial and maps polynomial k-forms to
trace-free (n-k)-forms; written over the barycentric frame all geometric
prefactors cancel, so it is implemented purely combinatorially (that
cancellation is exactly its affine invariance, which the tests exercise
against the geometric definition).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial

from .exterior import AltForm
from .linalg import Matrix
from .polyform import (PolyForm, Span, _expand_rho, full_space, integrate,
                       is_trace_free, trace_free_subspace, trimmed_space, whitney)
from .scalars import ONE, Q, ZERO, scalar_is_zero, sqrt_scalar
from .simplex import Face, Simplex


class SimplexStar:
    """The affinely invariant duality on constant forms attached to a simplex."""

    def __init__(self, simplex: Simplex):
        self.simplex = simplex
        self.gradient_forms = simplex.gradient_forms()
        n = simplex.n
        self.n_factorial_volume = simplex.volume * factorial(n)
        self.prefactor = self.n_factorial_volume / sqrt_scalar(n + 1)
        self._wedges = {}

    def _gradient_wedge(self, rho) -> AltForm:
        got = self._wedges.get(rho)
        if got is None:
            got = AltForm.unit(self.simplex.n, ())
            for i in rho:
                got = got.wedge(self.gradient_forms[i])
            self._wedges[rho] = got
        return got

    def star(self, omega: AltForm) -> AltForm:
        """Sum over complementary barycentric wedges, scaled by n!|T|/sqrt(n+1)."""
        n = self.simplex.n
        k = omega.k
        out = AltForm(n, n - k)
        for rho in itertools.combinations(range(n + 1), n - k):
            dlam = self._gradient_wedge(rho)
            coeff = omega.wedge(dlam).hodge().coeffs.get((), ZERO)
            if scalar_is_zero(coeff):
                continue
            out = out + dlam.scale(self.prefactor * coeff)
        return out


def trace_free_star(omega: PolyForm) -> PolyForm:
    """Pointwise star into trace-free forms: each complementary barycentric
    wedge is weighted by the bubble monomial over the left-out vertices.

    The geometric prefactor cancels against the volume-form coefficient of
    each wedge, leaving integer signs; no simplex geometry enters.
    """
    face = omega.face
    d = face.dim
    k = omega.k
    raw = []
    for rho in itertools.combinations(range(d + 1), d - k):
        rho_set = set(rho)
        rho_star = tuple(p for p in range(d + 1) if p not in rho_set)
        for (alpha, r1), coeff in omega.terms.items():
            if rho_set & set(r1):
                continue
            eps = 0
            for sgn, _key in _expand_rho(r1 + rho, d):
                eps += sgn
            if eps == 0:
                continue
            bumped = tuple(a + (1 if p in rho_star else 0) for p, a in enumerate(alpha))
            raw.append((coeff * eps, bumped, rho))
    return PolyForm.make(face, d - k, raw)


def star_inner(a: PolyForm, b: PolyForm):
    """The weighted inner product int(a ^ star b); symmetric and positive
    definite on polynomial spans."""
    if a.face != b.face or a.k != b.k:
        raise ValueError("inner product needs forms of one degree on one face")
    return integrate(a.wedge(trace_free_star(b)))


def gram_matrix(forms) -> Matrix:
    forms = list(forms)
    return Matrix([[star_inner(a, b) for b in forms] for a in forms])


@dataclass
class IsoReport:
    family: str
    r: int
    k: int
    source_dim: int
    target_dim: int
    image_rank: int
    image_in_target: bool
    target_in_image: bool

    @property
    def isomorphism(self) -> bool:
        return (self.image_in_target and self.target_in_image
                and self.image_rank == self.source_dim == self.target_dim)


def iso_report(face: Face, family: str, r: int, k: int) -> IsoReport:
    """Check that the pointwise star maps the (r, k) space isomorphically
    onto the matching trace-free space of complementary degree."""
    n = face.dim
    if family == "full":
        src = full_space(face, r, k)
        tgt = trace_free_subspace(trimmed_space(face, r + k + 1, n - k))
    elif family == "trimmed":
        src = trimmed_space(face, r, k)
        tgt = trace_free_subspace(full_space(face, r + k, n - k))
    else:
        raise ValueError(f"unknown family {family!r}")
    images = [trace_free_star(f) for f in src.forms]
    image_span = Span(face, n - k, images, family="image")
    return IsoReport(
        family=family, r=r, k=k,
        source_dim=src.dimension(),
        target_dim=tgt.dimension(),
        image_rank=image_span.dimension(),
        image_in_target=all(tgt.contains(f) for f in image_span.basis_forms()),
        target_in_image=image_span.contains_span(
            Span(face, n - k, tgt.basis_forms(), family="basis")),
    )


def boundary_vanishing_report(omega: PolyForm):
    """Starred trace-free forms vanish pointwise on the whole boundary.

    Returns (ok, witness) where witness names the face and sample point of
    the first failure.  The check runs both ways: symbolic restriction of
    every coefficient to each proper face, plus pointwise evaluation at
    vertices, edge midpoints and face centroids.
    """
    if not is_trace_free(omega):
        raise ValueError("input must be trace-free")
    mu = trace_free_star(omega)
    face = mu.face
    for g in face.subfaces(proper=True):
        restricted = _restrict_pointwise(mu, g)
        for rho, poly in restricted.items():
            if not poly.is_zero():
                return False, {"face": g.sigma, "rho": rho, "poly": poly.to_text()}
        for bary in _boundary_samples(g):
            lifted = _lift_bary(face, g, bary)
            if not mu.evaluate(lifted).is_zero():
                return False, {"face": g.sigma, "point": [str(b) for b in lifted]}
    return True, None


def _restrict_pointwise(omega: PolyForm, g: Face) -> dict:
    """Coefficient polynomials of omega restricted (as functions) to a face,
    keyed by the untouched frame indices."""
    positions = omega.face.positions_of(g)
    keep = set(positions)
    remap = {p: q for q, p in enumerate(positions)}
    by_rho: dict = {}
    for (alpha, rho), coeff in omega.terms.items():
        if any(a and p not in keep for p, a in enumerate(alpha)):
            continue
        new_alpha = tuple(alpha[p] for p in positions)
        by_rho.setdefault(rho, []).append((coeff, new_alpha, ()))
    return {rho: PolyForm.make(g, 0, raw) for rho, raw in by_rho.items()}


def _boundary_samples(g: Face):
    dim = g.dim
    samples = [g.vertex_bary(p) for p in range(dim + 1)]
    samples.append(g.centroid_bary())
    half = Q(1, 2)
    for a, b in itertools.combinations(range(dim + 1), 2):
        samples.append(tuple(half if p in (a, b) else ZERO for p in range(dim + 1)))
    return samples


def _lift_bary(face: Face, g: Face, bary):
    positions = face.positions_of(g)
    out = [ZERO] * (face.dim + 1)
    for q, p in enumerate(positions):
        out[p] = bary[q]
    return tuple(out)


@dataclass
class DualReport:
    family: str
    r: int
    k: int
    vandermonde: Matrix
    gram: Matrix
    determinant: object
    invertible: bool


def dual_vandermonde(face: Face, family: str, r: int, k: int) -> DualReport:
    """Functionals int(omega ^ eta) of the complementary-degree moment space
    against a basis of the trace-free space, plus the star Gram of the etas."""
    n = face.dim
    if family == "full":
        primal = trace_free_subspace(full_space(face, r, k))
        dual_r = r - (n - k)
        dual = trimmed_space(face, dual_r, n - k) if dual_r >= 1 else None
    elif family == "trimmed":
        primal = trace_free_subspace(trimmed_space(face, r, k))
        dual_r = r - (n - k) - 1
        dual = full_space(face, dual_r, n - k) if dual_r >= 0 else None
    else:
        raise ValueError(f"unknown family {family!r}")
    if dual is None or dual.dimension() == 0:
        raise ValueError(f"empty dual space for family={family}, r={r}, k={k}")
    basis = primal.basis_forms()
    etas = dual.basis_forms()
    v = Matrix([[integrate(b.wedge(e)) for e in etas] for b in basis])
    det = v.det() if v.rows == v.cols else ZERO
    return DualReport(
        family=family, r=r, k=k,
        vandermonde=v,
        gram=gram_matrix(etas),
        determinant=det,
        invertible=v.rows == v.cols and not scalar_is_zero(det),
    )


# ---------------- legacy bubble-multiplication maps ----------------


def h_full_pairs(face: Face, r: int, k: int):
    """Generator pairs of the classical full-space map: the coefficient rides
    on a complementary barycentric form and lands on a bubble times the
    matching lowest-order form."""
    from .combinatorics import multi_indices

    n = face.dim
    pairs = []
    for tail in itertools.combinations(range(1, n + 1), n - k):
        rho = (0,) + tail
        rho_star = tuple(i for i in range(n + 1) if i not in rho)
        mono_star = tuple(1 if i in rho_star else 0 for i in range(n + 1))
        for alpha in multi_indices(n, r):
            inp = PolyForm.generator(face, alpha, rho_star)
            out = PolyForm.monomial(
                face, tuple(a + m for a, m in zip(alpha, mono_star))).wedge(whitney(face, rho))
            pairs.append((rho, inp, out))
    return pairs


def h_trimmed_pairs(face: Face, r: int, k: int):
    """Generator pairs of the classical trimmed-space map: a Whitney form
    with a coefficient in the trailing barycentric variables maps to the
    bubble times the complementary barycentric form."""
    from .combinatorics import multi_indices

    n = face.dim
    pairs = []
    for rho in itertools.combinations(range(n + 1), k + 1):
        rho_star = tuple(i for i in range(n + 1) if i not in rho)
        mono_rho = tuple(1 if i in rho else 0 for i in range(n + 1))
        for alpha in multi_indices(n, r - 1):
            if any(a and i < rho[0] for i, a in enumerate(alpha)):
                continue
            inp = PolyForm.monomial(face, alpha).wedge(whitney(face, rho))
            out = PolyForm.generator(face, tuple(a + m for a, m in zip(alpha, mono_rho)),
                                     rho_star)
            pairs.append((rho, inp, out))
    return pairs


def legacy_sign_report(face: Face, r: int, k: int):
    """Signs relating each legacy-map generator image to the pointwise star.

    Returns {"full": {rho: sign}, "trimmed": {rho: sign}}; raises if any
    generator image is not plus or minus the star image, or if the sign is
    not constant per index class.
    """
    out = {"full": {}, "trimmed": {}}
    for kind, pairs in (("full", h_full_pairs(face, r, k)),
                        ("trimmed", h_trimmed_pairs(face, r, k))):
        for rho, inp, image in pairs:
            starred = trace_free_star(inp)
            if image == starred:
                sign = 1
            elif image == -starred:
                sign = -1
            else:
                raise AssertionError(f"legacy {kind} image differs from star by more than sign")
            prev = out[kind].setdefault(rho, sign)
            if prev != sign:
                raise AssertionError(f"inconsistent sign within class {rho}")
    return out


# ---------------- vector field translations (n = 2, 3) ----------------


@dataclass
class VectorPoly:
    """Vector field with exact polynomial Cartesian components."""

    simplex: Simplex
    components: tuple

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other):
        return VectorPoly(self.simplex,
                          tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        return VectorPoly(self.simplex,
                          tuple(a - b for a, b in zip(self.components, other.components)))

    def __eq__(self, other):
        return (isinstance(other, VectorPoly) and self.simplex is other.simplex
                and all(a == b for a, b in zip(self.components, other.components)))

    def scale(self, factor):
        return VectorPoly(self.simplex, tuple(c.scale(factor) for c in self.components))

    def dot_constant(self, vec) -> PolyForm:
        out = PolyForm.zero(self.simplex.top, 0)
        for comp, v in zip(self.components, vec):
            if not scalar_is_zero(v):
                out = out + comp.scale(v)
        return out


def vector_constant(simplex: Simplex, coords) -> VectorPoly:
    face = simplex.top
    return VectorPoly(simplex, tuple(PolyForm.constant(face, Q(c)) for c in coords))


def _edge_data(simplex: Simplex):
    for a, b in itertools.combinations(range(simplex.n + 1), 2):
        va, vb = simplex.vertices[a], simplex.vertices[b]
        yield (a, b), tuple(y - x for x, y in zip(va, vb))


def _facet_data(simplex: Simplex):
    n = simplex.n
    for m in range(n + 1):
        sigma = tuple(i for i in range(n + 1) if i != m)
        verts = [simplex.vertices[i] for i in sigma]
        if n == 2:
            w = tuple(y - x for x, y in zip(verts[0], verts[1]))
            scaled_normal = (-w[1], w[0])
        elif n == 3:
            w1 = tuple(y - x for x, y in zip(verts[0], verts[1]))
            w2 = tuple(y - x for x, y in zip(verts[0], verts[2]))
            scaled_normal = (w1[1] * w2[2] - w1[2] * w2[1],
                             w1[2] * w2[0] - w1[0] * w2[2],
                             w1[0] * w2[1] - w1[1] * w2[0])
        else:
            raise ValueError("facet normals implemented for n in {2, 3}")
        yield sigma, scaled_normal


def normal_free_proxy(simplex: Simplex, u: VectorPoly) -> VectorPoly:
    """Edge-sum translation of the pointwise star: (1/n!|T|) times the sum of
    <u, e> lambda_edge e over all edges.  The result has vanishing normal
    trace on every facet."""
    if simplex.n not in (2, 3):
        raise ValueError("edge translation implemented for n in {2, 3}")
    face = simplex.top
    pref = ONE / (simplex.volume * factorial(simplex.n))
    comps = [PolyForm.zero(face, 0) for _ in range(simplex.n)]
    for (a, b), evec in _edge_data(simplex):
        mono = PolyForm.monomial(face, tuple(1 if i in (a, b) else 0
                                             for i in range(simplex.n + 1)))
        pairing = u.dot_constant(evec)
        weight = pairing.wedge(mono)
        for r in range(simplex.n):
            if not scalar_is_zero(evec[r]):
                comps[r] = comps[r] + weight.scale(pref * evec[r])
    return VectorPoly(simplex, tuple(comps))


def tangent_free_proxy(simplex: Simplex, u: VectorPoly) -> VectorPoly:
    """Facet-sum translation: (1/n!|T|) times the sum of <u, nu~> lambda_facet nu~
    with nu~ the facet normal scaled by (n-1)! |facet|."""
    if simplex.n not in (2, 3):
        raise ValueError("facet translation implemented for n in {2, 3}")
    face = simplex.top
    pref = ONE / (simplex.volume * factorial(simplex.n))
    comps = [PolyForm.zero(face, 0) for _ in range(simplex.n)]
    for sigma, normal in _facet_data(simplex):
        mono = PolyForm.monomial(face, tuple(1 if i in sigma else 0
                                             for i in range(simplex.n + 1)))
        pairing = u.dot_constant(normal)
        weight = pairing.wedge(mono)
        for r in range(simplex.n):
            if not scalar_is_zero(normal[r]):
                comps[r] = comps[r] + weight.scale(pref * normal[r])
    return VectorPoly(simplex, tuple(comps))


def flat_oneform(u: VectorPoly) -> PolyForm:
    """Index lowering: the 1-form pairing with u under the Euclidean metric."""
    simplex = u.simplex
    face = simplex.top
    frame = simplex.frame()
    out = PolyForm.zero(face, 1)
    zero_alpha = (0,) * (simplex.n + 1)
    for i in range(1, simplex.n + 1):
        coeff = PolyForm.zero(face, 0)
        for c in range(simplex.n):
            w = frame.entries[c][i - 1]
            if not scalar_is_zero(w):
                coeff = coeff + u.components[c].scale(w)
        out = out + coeff.wedge(PolyForm.generator(face, zero_alpha, (i,)))
    return out


def sharp_vector(w: PolyForm) -> VectorPoly:
    """Index raising of a 1-form back to a vector field."""
    simplex = w.face.simplex
    if not w.face.is_top or w.k != 1:
        raise ValueError("index raising needs an ambient 1-form")
    grads, _ = simplex.barycentric_gradients()
    comps = [PolyForm.zero(w.face, 0) for _ in range(simplex.n)]
    for (alpha, rho), coeff in w.terms.items():
        i = rho[0]
        for r in range(simplex.n):
            g = grads[i][r]
            if not scalar_is_zero(g):
                comps[r] = comps[r] + PolyForm.monomial(w.face, alpha, coeff * g)
    return VectorPoly(simplex, tuple(comps))


def ambient_coefficients(omega: PolyForm) -> dict:
    """Cartesian-coordinate coefficient polynomials of a form on a full face."""
    simplex = omega.face.simplex
    if not omega.face.is_top:
        raise ValueError("ambient coefficients need a full-dimensional face")
    dl = simplex.gradient_forms()
    cache = {}
    out: dict = {}
    for (alpha, rho), coeff in omega.terms.items():
        amb = cache.get(rho)
        if amb is None:
            amb = AltForm.unit(simplex.n, ())
            for i in rho:
                amb = amb.wedge(dl[i])
            cache[rho] = amb
        for key, val in amb.coeffs.items():
            cur = out.setdefault(key, PolyForm.zero(omega.face, 0))
            out[key] = cur + PolyForm.monomial(omega.face, alpha, coeff * val)
    return {key: poly for key, poly in out.items() if not poly.is_zero()}


def vector_from_codim1(omega: PolyForm) -> VectorPoly:
    """Read an (n-1)-form as a vector through contraction of the volume form:
    omega = star(flat w)."""
    simplex = omega.face.simplex
    n = simplex.n
    if omega.k != n - 1:
        raise ValueError("expected a codimension-one form")
    amb = ambient_coefficients(omega)
    zero = PolyForm.zero(omega.face, 0)
    if n == 2:
        return VectorPoly(simplex, (amb.get((2,), zero), -amb.get((1,), zero)))
    if n == 3:
        return VectorPoly(simplex, (amb.get((2, 3), zero), -amb.get((1, 3), zero),
                                    amb.get((1, 2), zero)))
    raise ValueError("implemented for n in {2, 3}")


def normal_traces_vanish(u: VectorPoly) -> bool:
    """Whether <u, facet normal> restricts to zero on every facet."""
    simplex = u.simplex
    grads, _ = simplex.barycentric_gradients()
    for m in range(simplex.n + 1):
        facet = simplex.face(tuple(i for i in range(simplex.n + 1) if i != m))
        pairing = u.dot_constant(grads[m])
        if not pairing.trace(facet).is_zero():
            return False
    return True


def tangent_traces_vanish(u: VectorPoly) -> bool:
    """Whether the tangential part of u restricts to zero on every facet."""
    simplex = u.simplex
    for m in range(simplex.n + 1):
        sigma = tuple(i for i in range(simplex.n + 1) if i != m)
        facet = simplex.face(sigma)
        base = simplex.vertices[sigma[0]]
        for other in sigma[1:]:
            tangent = tuple(y - x for x, y in zip(base, simplex.vertices[other]))
            pairing = u.dot_constant(tangent)
            if not pairing.trace(facet).is_zero():
                return False
    return True
