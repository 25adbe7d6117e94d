"""Extension operators: bubble extensions, the bubble decomposition, the
unified consistent extension, the classical projector-based extensions, and
geometric decompositions built from them.

The bubble extension from a face g into a face xi pulls a form back along
the centroid projector and wedges it with the trace-free weight
lambda_g (d-lambda)_{xi minus g}.  Inverting the sum of bubble extensions
is a triangular sweep over face dimensions: restrict the residual to each
face, match the perpendicular components against the wedge basis, divide
out the face bubble exactly, and subtract.  A nonzero final residual means
the input was not trace-free, which is reported rather than repaired.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .linalg import Matrix, RowBasis
from .polyform import (PolyForm, Span, _expand_rho, divide_by_bubble, full_space,
                       is_trace_free, space, trace_free_subspace, trimmed_space)
from .scalars import ONE, ZERO, scalar_is_zero
from .simplex import Face, centroid_projector, weighted_projector
from .starops import trace_free_star


class NotTraceFreeError(ValueError):
    """Raised when an operator restricted to trace-free inputs gets fed more."""


def z_faces(face: Face, k: int):
    """Faces of dimension at least dim - k: the index set of the bubble sum."""
    lo = max(face.dim - k, 0)
    out = []
    for e in range(lo, face.dim + 1):
        for combo in itertools.combinations(face.sigma, e + 1):
            out.append(face.simplex.face(combo))
    return out


def _weight_positions(xi: Face, inner: Face, outer: Face):
    """Positions in xi of inner's vertices and of outer-minus-inner."""
    inner_pos = xi.positions_of(inner)
    inner_set = set(inner.sigma)
    rest = tuple(p for p, v in enumerate(xi.sigma)
                 if v in set(outer.sigma) and v not in inner_set)
    return inner_pos, rest


def _assemble(omega_g: PolyForm, xi: Face, outer: Face) -> PolyForm:
    """Pull omega_g back along the centroid projector onto xi and wedge with
    lambda_g (d-lambda)_{outer minus g}."""
    g = omega_g.face
    proj = centroid_projector(xi, g)
    pulled = omega_g.pullback(proj)
    inner_pos, rest = _weight_positions(xi, g, outer)
    alpha = tuple(1 if p in set(inner_pos) else 0 for p in range(xi.dim + 1))
    weight = PolyForm.generator(xi, alpha, rest)
    return pulled.wedge(weight)


def bubble_extend(omega_g: PolyForm, xi: Face) -> PolyForm:
    """Trace-free extension of a lower-degree form from a nested face.

    The form degree rises by the codimension; the output's trace on every
    proper face of xi vanishes.
    """
    g = omega_g.face
    if not xi.contains(g):
        raise ValueError(f"{g.sigma} is not a face of {xi.sigma}")
    k_out = omega_g.k + (xi.dim - g.dim)
    if k_out > xi.dim:
        raise ValueError("degree overflow: the extension would exceed the face dimension")
    return _assemble(omega_g, xi, xi)


@dataclass
class BubbleTrace:
    """The per-face components of a trace-free form's bubble decomposition."""

    face: Face
    k: int
    components: dict = field(default_factory=dict)

    def component(self, sigma) -> PolyForm:
        sigma = tuple(sigma)
        got = self.components.get(sigma)
        if got is not None:
            return got
        g = self.face.simplex.face(sigma)
        return PolyForm.zero(g, self.k - (self.face.dim - g.dim))

    def reassemble(self) -> PolyForm:
        out = PolyForm.zero(self.face, self.k)
        for comp in self.components.values():
            out = out + bubble_extend(comp, self.face)
        return out


def bubble_decompose(omega: PolyForm) -> BubbleTrace:
    """Invert the sum of bubble extensions on a trace-free form.

    Sweeps face dimensions from smallest to largest; each component is the
    unique form whose bubble extension matches the residual's pointwise
    restriction to that face.
    """
    xi = omega.face
    k = omega.k
    result = BubbleTrace(xi, k)
    residual = omega
    lo = max(xi.dim - k, 0)
    for e in range(lo, xi.dim + 1):
        extracted = []
        for combo in itertools.combinations(xi.sigma, e + 1):
            g = xi.simplex.face(combo)
            comp = _extract_component(residual, g, xi)
            if comp is not None and not comp.is_zero():
                extracted.append(comp)
                result.components[combo] = comp
        for comp in extracted:
            residual = residual - bubble_extend(comp, xi)
    if not residual.is_zero():
        raise NotTraceFreeError("nonzero residual after the bubble sweep; "
                                "the input has a nonvanishing trace")
    return result


def _extract_component(residual: PolyForm, g: Face, xi: Face):
    """Solve bubble_extend(comp, xi) == residual pointwise on g."""
    k = residual.k
    kg = k - (xi.dim - g.dim)
    if kg < 0:
        return None
    positions = xi.positions_of(g)
    keep = set(positions)
    remap = {p: q for q, p in enumerate(positions)}
    d_xi = xi.dim
    e = g.dim

    # Wedge basis: the image of each canonical frame form of g under the
    # projector pullback, wedged with the complementary barycentric forms.
    rest = tuple(p for p in range(d_xi + 1) if p not in keep)
    hats = list(itertools.combinations(range(1, e + 1), kg))
    columns = []
    keyset = set()
    for hat in hats:
        lifted = tuple(positions[q] for q in hat) + rest
        col = {}
        for sgn, key in _expand_rho(lifted, d_xi):
            col[key] = ONE if sgn > 0 else -ONE
            keyset.add(key)
        columns.append(col)

    # Restriction of the residual: substitute the off-face coordinates by 0.
    rhs: dict = {}
    for (alpha, rho), coeff in residual.terms.items():
        if any(a and p not in keep for p, a in enumerate(alpha)):
            continue
        alpha_g = tuple(alpha[p] for p in positions)
        cur = rhs.setdefault(rho, {})
        prev = cur.get(alpha_g, ZERO) + coeff
        if scalar_is_zero(prev):
            cur.pop(alpha_g, None)
        else:
            cur[alpha_g] = prev
        keyset.add(rho)

    keys = sorted(keyset)
    mat = Matrix([[col.get(key, ZERO) for col in columns] for key in keys])
    monomials = sorted({a for polys in rhs.values() for a in polys})
    coeff_polys = [dict() for _ in hats]
    for alpha_g in monomials:
        vec = [rhs.get(key, {}).get(alpha_g, ZERO) for key in keys]
        sol = mat.solve(vec)
        if sol is None:
            raise NotTraceFreeError(
                f"restriction to face {g.sigma} leaves a component outside the wedge basis")
        for j, val in enumerate(sol):
            if not scalar_is_zero(val):
                coeff_polys[j][alpha_g] = val

    comp = PolyForm.zero(g, kg)
    for hat, poly in zip(hats, coeff_polys):
        if not poly:
            continue
        scalar = PolyForm(g, 0, {(alpha, ()): c for alpha, c in poly.items()})
        quotient = divide_by_bubble(scalar)
        if quotient is None:
            raise NotTraceFreeError(
                f"coefficient on face {g.sigma} is not divisible by the face bubble")
        comp = comp + quotient.wedge(PolyForm.generator(g, (0,) * (e + 1), hat))
    return comp


def extend(omega: PolyForm, xi: Face) -> PolyForm:
    """The unified consistent extension of a trace-free form into a bigger face.

    Acts on the bubble components: each keeps its projector pullback but is
    wedged with barycentric forms indexed inside the source face only, so
    the output has nonzero trace exactly on faces containing the source.
    """
    tau = omega.face
    if not xi.contains(tau):
        raise ValueError(f"{tau.sigma} is not a face of {xi.sigma}")
    if not is_trace_free(omega):
        raise NotTraceFreeError("the unified extension is defined on trace-free forms")
    if tau == xi:
        return omega
    parts = bubble_decompose(omega)
    out = PolyForm.zero(xi, omega.k)
    for sigma, comp in parts.components.items():
        out = out + _assemble(comp, xi, tau)
    return out


# ---------------- classical extensions ----------------


def legacy_extend_full(omega: PolyForm, target: Face, r: int) -> PolyForm:
    """Degree-r extension through weighted vertex-average projectors.

    The input is split over homogeneous degree-r barycentric monomials (an
    error if its degree exceeds r); each monomial block is pulled back
    through the projector whose weights are that monomial's exponents.
    """
    sigma_face = omega.face
    if not target.contains(sigma_face):
        raise ValueError("target must contain the source face")
    blocks: dict = {}
    for (alpha, rho), coeff in omega.canonical_terms(r).items():
        blocks.setdefault(alpha, {})[rho] = coeff
    pos = target.positions_of(sigma_face)
    out = PolyForm.zero(target, omega.k)
    for alpha, rhos in blocks.items():
        proj = weighted_projector(target, sigma_face, alpha)
        block = PolyForm(sigma_face, omega.k, {((0,) * (sigma_face.dim + 1), rho): c
                                               for rho, c in rhos.items()})
        mono = tuple(0 for _ in range(target.dim + 1))
        mono = list(mono)
        for q, a in enumerate(alpha):
            mono[pos[q]] = a
        out = out + PolyForm.monomial(target, tuple(mono)).wedge(block.pullback(proj))
    return out


class GeneratorFormError(ValueError):
    """Raised when a form admits no representation over the requested generators."""


def whitney_representation(omega: PolyForm, r: int):
    """A deterministic representation over monomial-times-Whitney generators.

    Returns [(coeff, alpha, rho_positions)] with |alpha| = r - 1; raises
    GeneratorFormError when the form is not in the trimmed span.
    """
    from .combinatorics import multi_indices

    face = omega.face
    span = trimmed_space(face, r, omega.k)
    coords = span.member(omega)
    if coords is None:
        raise GeneratorFormError("form is outside the trimmed span of this degree")
    labels = [(alpha, rho) for alpha in multi_indices(face.dim, r - 1)
              for rho in itertools.combinations(range(face.dim + 1), omega.k + 1)]
    return [(c, alpha, rho) for c, (alpha, rho) in zip(coords, labels)
            if not scalar_is_zero(c)]


def legacy_extend_trimmed(terms, source: Face, target: Face) -> PolyForm:
    """Whitney-by-Whitney extension: each generator monomial keeps its
    exponents and each Whitney form is re-read over the host vertices.

    `terms` lists (coeff, alpha over source positions, rho source positions).
    """
    from .polyform import whitney

    if not target.contains(source):
        raise ValueError("target must contain the source face")
    pos = target.positions_of(source)
    out = PolyForm.zero(target, len(terms[0][2]) - 1 if terms else 0)
    for coeff, alpha, rho in terms:
        mono = [0] * (target.dim + 1)
        for q, a in enumerate(alpha):
            mono[pos[q]] = a
        lifted_rho = tuple(pos[q] for q in rho)
        part = PolyForm.monomial(target, tuple(mono), coeff).wedge(whitney(target, lifted_rho))
        out = out + part
    return out


# ---------------- geometric decompositions ----------------


@dataclass
class DecompositionReport:
    face: Face
    family: str
    r: int
    k: int
    component_dims: dict
    components_independent: bool
    components_in_target: bool
    spans_target: bool
    target_dim: int

    @property
    def direct_sum(self) -> bool:
        return (self.components_independent and self.components_in_target
                and self.spans_target
                and sum(self.component_dims.values()) == self.target_dim)


def geometric_components(face: Face, family: str, r: int, k: int) -> dict:
    """Per-face component spans: unified extensions of trace-free subspaces."""
    comps = {}
    for e in range(k, face.dim + 1):
        for combo in itertools.combinations(face.sigma, e + 1):
            g = face.simplex.face(combo)
            sub = trace_free_subspace(space(g, family, r, k))
            forms = [extend(b, face) for b in sub.basis_forms()]
            comps[combo] = Span(face, k, forms, family=f"component-{family}")
    return comps


def star_route_components(face: Face, family: str, r: int, k: int) -> dict:
    """The same components built as extensions of starred unrestricted spaces.

    The trace-free source on a d-face comes from starring the complementary
    unrestricted space of degree r - d + k (trimmed feeds full and vice
    versa, degrees matched through the star isomorphisms).
    """
    comps = {}
    for e in range(k, face.dim + 1):
        for combo in itertools.combinations(face.sigma, e + 1):
            g = face.simplex.face(combo)
            if family == "full":
                r_src = r - e + k
                src = trimmed_space(g, r_src, e - k) if r_src >= 1 else None
            else:
                r_src = r - e + k - 1
                src = full_space(g, r_src, e - k) if r_src >= 0 else None
            forms = []
            if src is not None:
                starred = Span(g, k, [trace_free_star(f) for f in src.forms],
                               family="starred")
                forms = [extend(b, face) for b in starred.basis_forms()]
            comps[combo] = Span(face, k, forms, family=f"star-component-{family}")
    return comps


def decomposition_report(face: Face, family: str, r: int, k: int,
                         components: dict | None = None) -> DecompositionReport:
    """Exact direct-sum verdict for a component family against the target space."""
    target = space(face, family, r, k)
    if components is None:
        components = geometric_components(face, family, r, k)
    deg = max([target.degree]
              + [f.effective_degree() for s in components.values() for f in s.forms])

    # containment: every component form must reduce against the target's basis
    target_rb = RowBasis()
    for b in target.basis_forms():
        target_rb.feed(b.canonical_terms(deg))
    in_target = all(not target_rb.feed(f.canonical_terms(deg))[0]
                    for s in components.values() for f in s.forms)

    # independence and span: all component forms together, then the target
    union_rb = RowBasis()
    independent = True
    for s in components.values():
        for f in s.forms:
            ok, _ = union_rb.feed(f.canonical_terms(deg))
            independent = independent and ok
    union_rank = union_rb.rank
    spans = all(not union_rb.feed(b.canonical_terms(deg))[0] for b in target.basis_forms())

    dims = {sigma: s.dimension() for sigma, s in components.items()}
    return DecompositionReport(
        face=face, family=family, r=r, k=k,
        component_dims=dims,
        components_independent=independent and union_rank == sum(dims.values()),
        components_in_target=in_target,
        spans_target=spans,
        target_dim=target.dimension(),
    )


def bubble_space_components(face: Face, r: int, k: int) -> dict:
    """Bubble extensions of unrestricted lower spaces: the direct-sum pieces
    of the trace-free full space."""
    comps = {}
    for g in z_faces(face, k):
        e = g.dim
        r_src = r - e - 1
        kg = k - (face.dim - e)
        if r_src < 0 or kg < 0 or kg > e:
            continue
        src = full_space(g, r_src, kg)
        forms = [bubble_extend(f, face) for f in src.basis_forms()]
        comps[g.sigma] = Span(face, k, forms, family="bubble-component")
    return comps
