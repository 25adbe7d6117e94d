"""Polynomial differential k-forms on a simplex face, in barycentric form.

A form is a sum of terms  c * lambda^alpha * (d-lambda)_rho  over the
face's vertex positions 0..d.  Internally every term is normalized so that
rho is strictly increasing inside [1..d]: the single linear relation
d-lambda_0 = -(d-lambda_1 + ... + d-lambda_d) is eliminated eagerly, which
makes the coordinate-form part an honest basis of the face's alternating
algebra.  The scalar part keeps arbitrary multi-indices; two canonical
views are derived on demand:

* the reduced view substitutes lambda_0 = 1 - sum(lambda_i), leaving a true
  polynomial in lambda_1..lambda_d whose coefficients are unique, and
* the homogeneous view re-expands to barycentric monomials of one common
  total degree (the minimal one by default), unique per degree because
  homogeneous barycentric monomials of a fixed degree are independent.

Equality, serialization and all span computations go through these views.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial

from .combinatorics import multi_indices, perm_sign
from .linalg import Matrix, RowBasis
from .scalars import ONE, Q, ZERO, scalar_is_zero, scalar_str
from .simplex import AffineFaceMap, Face, inclusion


def _expand_rho(rho, d):
    """Normalize an index tuple over [0..d] into the canonical [1..d] basis.

    Returns a list of (sign, increasing tuple) pairs; duplicates yield [],
    and a leading 0 expands through the barycentric 1-form relation.
    """
    rho = tuple(rho)
    if len(set(rho)) < len(rho):
        return []
    if any(not 0 <= i <= d for i in rho):
        raise ValueError(f"index out of range in {rho}")
    s = perm_sign(rho)
    srt = tuple(sorted(rho))
    if srt and srt[0] == 0:
        rest = srt[1:]
        out = []
        for i in range(1, d + 1):
            if i in rest:
                continue
            s2 = perm_sign((i,) + rest)
            out.append((-s * s2, tuple(sorted((i,) + rest))))
        return out
    return [(s, srt)]


@lru_cache(maxsize=None)
def _one_minus_sum_power(exponent: int, d: int):
    """(1 - lambda_1 - ... - lambda_d)^exponent as {beta: int coefficient}."""
    out = {}
    for beta in _bounded_indices(d, exponent):
        total = sum(beta)
        coeff = factorial(exponent)
        for b in beta:
            coeff //= factorial(b)
        coeff //= factorial(exponent - total)
        out[beta] = -coeff if total % 2 else coeff
    return tuple(out.items())


@lru_cache(maxsize=None)
def _sum_power(exponent: int, slots: int):
    """(x_1 + ... + x_slots)^exponent as {gamma: multinomial}."""
    out = []
    for gamma in multi_indices(slots - 1, exponent):
        coeff = factorial(exponent)
        for g in gamma:
            coeff //= factorial(g)
        out.append((gamma, coeff))
    return tuple(out)


def _bounded_indices(slots: int, bound: int):
    if slots == 0:
        yield ()
        return
    for head in range(bound + 1):
        for tail in _bounded_indices(slots - 1, bound - head):
            yield (head,) + tail


class PolyForm:
    """Polynomial differential k-form on a face."""

    __slots__ = ("face", "k", "terms", "_reduced", "_canonical")

    def __init__(self, face: Face, k: int, terms: dict):
        if not 0 <= k <= face.dim:
            # allow k > dim only as the zero form (wedges overflow naturally)
            if terms:
                raise ValueError(f"no nonzero {k}-forms on a {face.dim}-face")
        self.face = face
        self.k = k
        self.terms = terms
        self._reduced = None
        self._canonical = None

    # ---------------- constructors ----------------

    @classmethod
    def make(cls, face: Face, k: int, raw_terms) -> "PolyForm":
        """Build from (coeff, alpha, rho) triples; rho may use index 0 freely."""
        d = face.dim
        acc = {}
        for coeff, alpha, rho in raw_terms:
            alpha = tuple(alpha)
            if len(alpha) != d + 1 or any(a < 0 for a in alpha):
                raise ValueError(f"bad exponent tuple {alpha}")
            if scalar_is_zero(coeff):
                continue
            for sgn, key in _expand_rho(rho, d):
                _bump(acc, (alpha, key), coeff if sgn > 0 else -coeff)
        return cls(face, k, acc)

    @classmethod
    def zero(cls, face: Face, k: int) -> "PolyForm":
        return cls(face, k, {})

    @classmethod
    def constant(cls, face: Face, value) -> "PolyForm":
        value = Q(value)
        zero_alpha = (0,) * (face.dim + 1)
        return cls(face, 0, {} if scalar_is_zero(value) else {(zero_alpha, ()): value})

    @classmethod
    def monomial(cls, face: Face, alpha, coeff=ONE) -> "PolyForm":
        return cls.make(face, 0, [(coeff, tuple(alpha), ())])

    @classmethod
    def generator(cls, face: Face, alpha, rho, coeff=ONE) -> "PolyForm":
        return cls.make(face, len(tuple(rho)), [(coeff, tuple(alpha), tuple(rho))])

    # ---------------- structure ----------------

    def is_zero(self) -> bool:
        return not self.reduced()

    def reduced(self) -> dict:
        """Unique representation over lambda_1..lambda_d monomials."""
        if self._reduced is None:
            d = self.face.dim
            acc = {}
            for (alpha, rho), coeff in self.terms.items():
                base = tuple(alpha[1:])
                for beta, ic in _one_minus_sum_power(alpha[0], d):
                    exps = tuple(b + e for b, e in zip(beta, base))
                    _bump(acc, (exps, rho), coeff * ic)
            self._reduced = acc
        return self._reduced

    def effective_degree(self) -> int:
        red = self.reduced()
        return max((sum(e) for e, _ in red), default=0)

    def canonical_terms(self, degree=None) -> dict:
        """Homogeneous representation at the given (default: minimal) degree."""
        mindeg = self.effective_degree()
        if degree is None:
            degree = mindeg
        elif degree < mindeg:
            raise ValueError(f"cannot homogenize degree-{mindeg} form at degree {degree}")
        if self._canonical is not None and self._canonical[0] == degree:
            return self._canonical[1]
        d = self.face.dim
        acc = {}
        for (exps, rho), coeff in self.reduced().items():
            pad = degree - sum(exps)
            for gamma, mult in _sum_power(pad, d + 1):
                alpha = (gamma[0],) + tuple(g + e for g, e in zip(gamma[1:], exps))
                _bump(acc, (alpha, rho), coeff * mult)
        if degree == mindeg:
            self._canonical = (degree, acc)
        return acc

    def canonical(self) -> "PolyForm":
        return PolyForm(self.face, self.k, dict(self.canonical_terms()))

    def __eq__(self, other):
        if not isinstance(other, PolyForm):
            return NotImplemented
        if self.face != other.face or (self.k != other.k
                                       and not (self.is_zero() and other.is_zero())):
            return False
        return self.reduced() == other.reduced()

    def __hash__(self):
        return hash((self.face, self.k, frozenset(self.reduced().items())))

    def __repr__(self):
        return f"PolyForm<{self.k} on {self.face}>({self.to_text()})"

    # ---------------- arithmetic ----------------

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        acc = dict(self.terms)
        for key, val in other.terms.items():
            _bump(acc, key, val)
        return PolyForm(self.face, self.k, acc)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PolyForm(self.face, self.k, {k: -v for k, v in self.terms.items()})

    def scale(self, factor) -> "PolyForm":
        if scalar_is_zero(factor):
            return PolyForm.zero(self.face, self.k)
        return PolyForm(self.face, self.k, {k: factor * v for k, v in self.terms.items()})

    def wedge(self, other: "PolyForm") -> "PolyForm":
        if other.face != self.face:
            raise ValueError("wedge of forms on different faces")
        d = self.face.dim
        acc = {}
        for (a1, r1), c1 in self.terms.items():
            for (a2, r2), c2 in other.terms.items():
                if set(r1) & set(r2):
                    continue
                alpha = tuple(x + y for x, y in zip(a1, a2))
                for sgn, key in _expand_rho(r1 + r2, d):
                    _bump(acc, (alpha, key), c1 * c2 if sgn > 0 else -(c1 * c2))
        return PolyForm(self.face, self.k + other.k, acc)

    def _check(self, other):
        if not isinstance(other, PolyForm) or other.face != self.face or other.k != self.k:
            raise ValueError("incompatible forms")

    # ---------------- calculus ----------------

    def exterior_derivative(self) -> "PolyForm":
        d = self.face.dim
        acc = {}
        for (alpha, rho), coeff in self.terms.items():
            for i in range(d + 1):
                a = alpha[i]
                if a == 0 or i in rho:
                    continue
                shrunk = alpha[:i] + (a - 1,) + alpha[i + 1:]
                for sgn, key in _expand_rho((i,) + rho, d):
                    _bump(acc, (shrunk, key), coeff * a * sgn)
        return PolyForm(self.face, self.k + 1, acc)

    def koszul(self, center_bary) -> "PolyForm":
        """Contraction with the position field relative to a base point.

        On a term lambda^alpha (d-lambda)_rho this expands each slot of rho
        into (lambda_i - lambda_i(center)) with the alternating sign.
        """
        if self.k == 0:
            raise ValueError("no contraction of 0-forms")
        center = tuple(center_bary)
        acc = {}
        for (alpha, rho), coeff in self.terms.items():
            for pos, idx in enumerate(rho):
                sgn = 1 if pos % 2 == 0 else -1
                rest = rho[:pos] + rho[pos + 1:]
                bumped = tuple(a + (1 if i == idx else 0) for i, a in enumerate(alpha))
                _bump(acc, (bumped, rest), coeff * sgn)
                cv = center[idx]
                if not scalar_is_zero(cv):
                    _bump(acc, (alpha, rest), -(coeff * cv) if sgn > 0 else coeff * cv)
        return PolyForm(self.face, self.k - 1, acc)

    def koszul_centroid(self, sub: Face) -> "PolyForm":
        """Koszul operator centered at the centroid of a nested face."""
        pos = set(self.face.positions_of(sub))
        w = Q(1, sub.dim + 1)
        center = tuple(w if p in pos else ZERO for p in range(self.face.dim + 1))
        return self.koszul(center)

    def interior_constant(self, direction_bary) -> "PolyForm":
        """Contraction with a constant vector given as a barycentric direction
        (coordinates summing to zero)."""
        if self.k == 0:
            raise ValueError("no contraction of 0-forms")
        mu = tuple(direction_bary)
        acc = {}
        for (alpha, rho), coeff in self.terms.items():
            for pos, idx in enumerate(rho):
                c = mu[idx]
                if scalar_is_zero(c):
                    continue
                sgn = 1 if pos % 2 == 0 else -1
                _bump(acc, (alpha, rho[:pos] + rho[pos + 1:]), coeff * c * sgn)
        return PolyForm(self.face, self.k - 1, acc)

    # ---------------- maps ----------------

    def trace(self, sub: Face) -> "PolyForm":
        """Pullback along the inclusion of a nested face, in that face's frame."""
        positions = self.face.positions_of(sub)
        remap = {p: q for q, p in enumerate(positions)}
        ds = sub.dim
        acc = {}
        for (alpha, rho), coeff in self.terms.items():
            if any(a and (p not in remap) for p, a in enumerate(alpha)):
                continue
            if any(p not in remap for p in rho):
                continue
            new_alpha = tuple(alpha[positions[q]] for q in range(ds + 1))
            for sgn, key in _expand_rho(tuple(remap[p] for p in rho), ds):
                _bump(acc, (new_alpha, key), coeff if sgn > 0 else -coeff)
        return PolyForm(sub, self.k, acc)

    def pullback(self, phi: AffineFaceMap) -> "PolyForm":
        """Pullback along an affine face map (self must live on phi's target)."""
        if phi.target != self.face:
            raise ValueError("form does not live on the map's target")
        src = phi.source
        ds = src.dim
        m = phi.matrix
        acc = {}
        for (alpha, rho), coeff in self.terms.items():
            poly = {(0,) * (ds + 1): coeff}
            for t, a in enumerate(alpha):
                for _ in range(a):
                    poly = _poly_mul_linear(poly, m[t])
            forms = _wedge_pulled_rows(rho, m, ds)
            for exps, pc in poly.items():
                for key, fc in forms.items():
                    _bump(acc, (exps, key), pc * fc)
        return PolyForm(src, self.k, acc)

    def evaluate(self, bary):
        """Pointwise value as an AltForm over the face's tangent frame."""
        from .exterior import AltForm

        bary = tuple(bary)
        out = AltForm(self.face.dim, self.k)
        for (alpha, rho), coeff in self.terms.items():
            val = coeff
            dead = False
            for b, a in zip(bary, alpha):
                if a:
                    if scalar_is_zero(b):
                        dead = True
                        break
                    val = val * b**a
            if not dead:
                out._accumulate(rho, val)
        return out

    def evaluate_ambient(self, bary):
        """Pointwise value as an ambient AltForm (full-dimensional faces)."""
        frame_value = self.evaluate(bary)
        if not self.face.is_top:
            raise ValueError("ambient evaluation needs a full-dimensional face")
        inv = self.face.simplex.frame().inverse()
        return frame_value.pullback(inv)

    # ---------------- output ----------------

    def to_text(self) -> str:
        canon = self.canonical_terms()
        if not canon:
            return "0"
        bits = []
        for (alpha, rho), coeff in sorted(canon.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = " ".join(f"l{i}^{a}" for i, a in enumerate(alpha) if a) or "1"
            tail = (" ^ " + "^".join(f"dl{i}" for i in rho)) if rho else ""
            bits.append(f"{scalar_str(coeff)} * {mono}{tail}")
        return " + ".join(bits)


def _bump(acc: dict, key, val):
    cur = acc.get(key)
    if cur is None:
        if not scalar_is_zero(val):
            acc[key] = val
        return
    cur = cur + val
    if scalar_is_zero(cur):
        del acc[key]
    else:
        acc[key] = cur


def _poly_mul_linear(poly: dict, row) -> dict:
    """Multiply a monomial dict by the affine form sum(row[s] * lambda_s)."""
    out = {}
    for exps, c in poly.items():
        for s, w in enumerate(row):
            if scalar_is_zero(w):
                continue
            key = exps[:s] + (exps[s] + 1,) + exps[s + 1:]
            _bump(out, key, c * w)
    return out


def _wedge_pulled_rows(rho, matrix, ds: int) -> dict:
    """Expand the wedge of pulled-back 1-forms for the rows listed in rho."""
    acc = {(): ONE}
    for t in rho:
        nxt = {}
        row = matrix[t]
        for partial, c in acc.items():
            for s, w in enumerate(row):
                if scalar_is_zero(w) or s in partial:
                    continue
                _bump(nxt, partial + (s,), c * w)
        acc = nxt
    out = {}
    for seq, c in acc.items():
        for sgn, key in _expand_rho(seq, ds):
            _bump(out, key, c if sgn > 0 else -c)
    return out


# ---------------- named forms ----------------


def whitney(face: Face, rho_positions) -> PolyForm:
    """The lowest-order trimmed form attached to the positions rho:
    sum_i (-1)^i lambda_{rho(i)} (d-lambda)_{rho minus rho(i)}."""
    rho = tuple(rho_positions)
    if len(set(rho)) != len(rho) or any(not 0 <= p <= face.dim for p in rho):
        raise ValueError(f"bad vertex positions {rho}")
    raw = []
    for i, p in enumerate(rho):
        alpha = tuple(1 if q == p else 0 for q in range(face.dim + 1))
        coeff = ONE if i % 2 == 0 else -ONE
        raw.append((coeff, alpha, rho[:i] + rho[i + 1:]))
    return PolyForm.make(face, len(rho) - 1, raw)


def bubble(face: Face) -> PolyForm:
    """The product of all barycentric coordinates of the face."""
    return PolyForm.monomial(face, (1,) * (face.dim + 1))


def volume_polyform(simplex) -> PolyForm:
    """The ambient volume form written barycentrically: n! |T| (d-lambda)_(1..n)."""
    face = simplex.top
    n = simplex.n
    coeff = simplex.volume * factorial(n)
    return PolyForm.generator(face, (0,) * (n + 1), tuple(range(1, n + 1)), coeff)


def from_ambient(face: Face, alt) -> PolyForm:
    """Rewrite a constant ambient AltForm over the barycentric frame of a
    full-dimensional face."""
    if not face.is_top:
        raise ValueError("ambient conversion needs a full-dimensional face")
    simplex = face.simplex
    n = simplex.n
    frame = simplex.frame()
    d = face.dim
    zero_alpha = (0,) * (d + 1)
    acc = {}
    for key, coeff in alt.coeffs.items():
        rows = [[frame.entries[j - 1][i] for i in range(n)] for j in key]
        partial = {(): coeff}
        for row in rows:
            nxt = {}
            for seq, c in partial.items():
                for s, w in enumerate(row):
                    if scalar_is_zero(w) or (s + 1) in seq:
                        continue
                    _bump(nxt, seq + (s + 1,), c * w)
            partial = nxt
        for seq, c in partial.items():
            for sgn, rkey in _expand_rho(seq, d):
                _bump(acc, (zero_alpha, rkey), c if sgn > 0 else -c)
    return PolyForm(face, alt.k, acc)


def integrate(omega: PolyForm):
    """Exact integral of a top-degree form over its face.

    Uses the closed barycentric moment rule; the rule itself is validated
    against an iterated-integration oracle in the tests.
    """
    d = omega.face.dim
    if omega.k != d:
        raise ValueError("only top-degree forms integrate over the face")
    total = ZERO
    for (alpha, rho), coeff in omega.terms.items():
        num = 1
        for a in alpha:
            num *= factorial(a)
        total = total + coeff * Q(num, factorial(sum(alpha) + d))
    return total


def is_trace_free(omega: PolyForm) -> bool:
    return all(omega.trace(f).is_zero()
               for f in omega.face.facets() if f.dim >= omega.k)


def divide_by_bubble(omega: PolyForm):
    """Exact division of a scalar polynomial by the face bubble, or None."""
    if omega.k != 0:
        raise ValueError("bubble division applies to scalar forms")
    quotient = {}
    for (alpha, rho), coeff in omega.canonical_terms().items():
        if any(a < 1 for a in alpha):
            return None
        quotient[(tuple(a - 1 for a in alpha), rho)] = coeff
    return PolyForm(omega.face, 0, quotient)


# ---------------- spans of forms ----------------


class Span:
    """A finite generator list of k-forms with exact rank machinery."""

    def __init__(self, face: Face, k: int, forms, family: str = "custom"):
        self.face = face
        self.k = k
        self.family = family
        self.forms = tuple(f for f in forms if not f.is_zero())
        for f in self.forms:
            if f.face != face or f.k != k:
                raise ValueError("span generators must share face and degree")
        self._built = None

    def __repr__(self):
        return f"Span<{self.family} {self.k}-forms on {self.face}, {len(self.forms)} gens>"

    @property
    def degree(self) -> int:
        return max((f.effective_degree() for f in self.forms), default=0)

    def _build(self):
        if self._built is None:
            rb = RowBasis()
            basis = []
            deg = self.degree
            for i, f in enumerate(self.forms):
                independent, _ = rb.feed(f.canonical_terms(deg))
                if independent:
                    basis.append(i)
            self._built = (rb, basis, deg)
        return self._built

    def dimension(self) -> int:
        return self._build()[0].rank

    def basis_forms(self):
        rb, basis, _ = self._build()
        return [self.forms[i] for i in basis]

    def member(self, omega: PolyForm):
        """Exact coordinates of omega over the generators, or None."""
        if omega.face != self.face or (omega.k != self.k and not omega.is_zero()):
            raise ValueError("candidate lives elsewhere")
        if omega.is_zero():
            return [ZERO] * len(self.forms)
        rb, _, deg = self._build()
        if omega.effective_degree() > deg:
            return None
        combo = rb.coordinates(omega.canonical_terms(deg))
        if combo is None:
            return None
        out = [ZERO] * len(self.forms)
        for i, c in combo.items():
            out[i] = c
        return out

    def contains(self, omega: PolyForm) -> bool:
        return self.member(omega) is not None

    def contains_span(self, other: "Span") -> bool:
        return all(self.contains(f) for f in other.forms)

    def equals(self, other: "Span") -> bool:
        return self.contains_span(other) and other.contains_span(self)


def full_space(face: Face, r: int, k: int) -> Span:
    """Polynomial k-forms of degree at most r (homogeneous generator set)."""
    if r < 0 or not 0 <= k <= face.dim:
        raise ValueError(f"invalid space parameters r={r}, k={k}")
    key = ("full", face, r, k)
    got = _space_cache.get(key)
    if got is None:
        d = face.dim
        forms = [PolyForm.generator(face, alpha, rho)
                 for alpha in multi_indices(d, r)
                 for rho in itertools.combinations(range(1, d + 1), k)]
        got = Span(face, k, forms, family="full")
        _space_cache[key] = got
    return got


def trimmed_space(face: Face, r: int, k: int) -> Span:
    """The Whitney-generated subfamily sitting between degrees r-1 and r."""
    if r < 1 or not 0 <= k <= face.dim:
        raise ValueError(f"invalid space parameters r={r}, k={k}")
    key = ("trimmed", face, r, k)
    got = _space_cache.get(key)
    if got is None:
        d = face.dim
        forms = [PolyForm.monomial(face, alpha).wedge(whitney(face, rho))
                 for alpha in multi_indices(d, r - 1)
                 for rho in itertools.combinations(range(d + 1), k + 1)]
        got = Span(face, k, forms, family="trimmed")
        _space_cache[key] = got
    return got


def space(face: Face, family: str, r: int, k: int) -> Span:
    if family == "full":
        return full_space(face, r, k)
    if family == "trimmed":
        return trimmed_space(face, r, k)
    raise ValueError(f"unknown family {family!r}")


def trace_free_subspace(span: Span) -> Span:
    """The subspace of the span with vanishing trace on every proper face.

    Constraints are stacked over facets only: any deeper face is reached by
    composing facet traces, so facet-vanishing already forces the rest.
    """
    key = ("tracefree", span.face, span.family, span.degree, span.k, span.forms)
    got = _space_cache.get(key)
    if got is not None:
        return got
    face, k = span.face, span.k
    family = f"trace-free-{span.family}"
    facets = [f for f in face.facets() if f.dim >= k]
    if not facets:
        result = Span(face, k, span.forms, family=family)
    else:
        deg = span.degree
        rb = RowBasis()
        kept = []
        for i, form in enumerate(span.forms):
            vec = {}
            for fi, facet in enumerate(facets):
                tr = form.trace(facet)
                for tkey, val in tr.canonical_terms(deg).items():
                    vec[(fi,) + tkey] = val
            independent, combo = rb.feed(vec)
            if not independent:
                candidate = span.forms[i]
                for j, c in combo.items():
                    candidate = candidate - span.forms[j].scale(c)
                if not candidate.is_zero():
                    kept.append(candidate)
        result = Span(face, k, kept, family=family)
    _space_cache[key] = result
    return result


def trace_free_space(face: Face, family: str, r: int, k: int) -> Span:
    return trace_free_subspace(space(face, family, r, k))


_space_cache: dict = {}


def clear_space_cache():
    _space_cache.clear()


def dimension_full(d: int, r: int, k: int) -> int:
    """Closed-form dimension of the degree-r k-form space on a d-face."""
    return comb(d + r, d) * comb(d, k)


def koszul_pullback_commutes(phi: AffineFaceMap, omega: PolyForm,
                             center_src, center_tgt) -> bool:
    """Exactness of the affine shift law for the position contraction:
    contracting the pullback at x equals pulling back the contraction at
    x-hat corrected by the constant offset phi(x) - x-hat."""
    lhs = omega.pullback(phi).koszul(center_src)
    offset = tuple(a - b for a, b in zip(phi.map_bary(center_src), center_tgt))
    rhs = (omega.koszul(center_tgt) - omega.interior_constant(offset)).pullback(phi)
    return lhs == rhs
