"""Exact algebra of relatively open simplicial cones in the coordinate space
of a cubic field.

Every set here is a finite disjoint union of relatively open simplicial
cones whose generators are primitive integer coordinate vectors. Because the
real-embedding map is an injective rational-linear map, membership, unit
translation, intersection and set equality of embedded Shintani sets are
decided by exact rational computations on coordinates; the embedding engine
is consulted only for total positivity and for the perturbation direction of
closures.

The one nontrivial primitive is splitting an open cell by a rational
hyperplane. Intersections carve one cell by the defining forms of another;
differences keep the carved-away pieces; open polyhedral pieces are
re-triangulated into open simplicial cells by a fan of the cross-section
polygon. The cross-section functional is the field trace: a rational linear
form that is strictly positive on every nonzero vector of the closed totally
positive cone, hence on every ray these operations can produce.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .embedding import RealEmbeddings, SignConfig
from .errors import (
    CaseMismatch,
    DegenerateGeometry,
    EmptySet,
    InclusionViolated,
    NotTotallyPositive,
    SignConditionFailed,
    WindowExceeded,
)
from .field import FieldElement, FieldSpec

Vec = tuple[int, int, int]


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _sign(v) -> int:
    return 0 if v == 0 else (1 if v > 0 else -1)


def primitive_vector(v) -> Vec:
    """Scale a nonzero rational vector by a positive rational to a primitive
    integer vector (direction preserving)."""
    fr = [Fraction(x) for x in v]
    if all(x == 0 for x in fr):
        raise DegenerateGeometry("zero vector cannot generate a ray")
    den = 1
    for x in fr:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = math.gcd(math.gcd(abs(ints[0]), abs(ints[1])), abs(ints[2]))
    return tuple(x // g for x in ints)  # type: ignore[return-value]


def _rank(rows) -> int:
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    for c in range(3):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = Fraction(1) / m[rank][c]
        m[rank] = [x * inv for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c]
                m[r] = [m[r][k] - f * m[rank][k] for k in range(3)]
        rank += 1
    return rank


def _adjugate(m):
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    return [
        [e * i - f * h, c * h - b * i, b * f - c * e],
        [f * g - d * i, a * i - c * g, c * d - a * f],
        [d * h - e * g, b * g - a * h, a * e - b * d],
    ]


def _det_int(m):
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _cross(a: Vec, b: Vec):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


class Cone:
    """A relatively open simplicial cone spanned by 1..3 independent
    primitive integer generators (strictly positive combinations only).

    H-form: the cell equals {x : e.x = 0 for equalities e, p.x > 0 for
    positivity forms p}; forms are integer vectors, computed lazily and
    cached.
    """

    __slots__ = ("gens", "_pos_forms", "_eq_forms")

    def __init__(self, gens: tuple[Vec, ...]):
        self.gens = gens
        self._pos_forms = None
        self._eq_forms = None

    @classmethod
    def from_rays(cls, rays) -> "Cone":
        rays = list(rays)
        canon = sorted({primitive_vector(r) for r in rays})
        if len(canon) != len(rays):
            raise DegenerateGeometry("repeated generators")
        if _rank(canon) != len(canon):
            raise DegenerateGeometry("generators are linearly dependent")
        return cls(tuple(canon))

    @property
    def dim(self) -> int:
        return len(self.gens)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        return f"Cone{self.gens}"

    def _compute_forms(self):
        gens = self.gens
        if len(gens) == 3:
            m = [[gens[j][i] for j in range(3)] for i in range(3)]
            s = _sign(_det_int(m))
            adj = _adjugate(m)
            pos = tuple(primitive_vector([s * v for v in row]) for row in adj)
            eq = ()
        elif len(gens) == 2:
            n = primitive_vector(_cross(gens[0], gens[1]))
            m = [[gens[0][i], gens[1][i], n[i]] for i in range(3)]
            adj = _adjugate(m)  # det = |cross|^2 > 0
            pos = tuple(primitive_vector(adj[row]) for row in (0, 1))
            eq = (n,)
        else:
            g = gens[0]
            for i, j in ((0, 1), (0, 2), (1, 2)):
                ei = tuple(1 if k == i else 0 for k in range(3))
                ej = tuple(1 if k == j else 0 for k in range(3))
                m = [[g[r], ei[r], ej[r]] for r in range(3)]
                d = _det_int(m)
                if d != 0:
                    break
            adj = _adjugate(m)
            s = _sign(d)
            pos = (primitive_vector([s * v for v in adj[0]]),)
            eq = tuple(primitive_vector(adj[row]) for row in (1, 2))
        self._pos_forms = pos
        self._eq_forms = eq

    @property
    def pos_forms(self):
        if self._pos_forms is None:
            self._compute_forms()
        return self._pos_forms

    @property
    def eq_forms(self):
        if self._eq_forms is None:
            self._compute_forms()
        return self._eq_forms

    def contains_vec(self, x) -> bool:
        """Exact membership of a rational/integer coordinate vector."""
        for p in self.pos_forms:
            if _dot(p, x) <= 0:
                return False
        for e in self.eq_forms:
            if _dot(e, x) != 0:
                return False
        return True

    def witness_vec(self) -> Vec:
        """An integer point in the cell (the sum of the generators)."""
        return tuple(sum(g[i] for g in self.gens) for i in range(3))  # type: ignore[return-value]

    def translate(self, matrix) -> "Cone":
        """Image under an invertible rational matrix acting on coordinates."""
        new = []
        for g in self.gens:
            img = [
                matrix[r][0] * g[0] + matrix[r][1] * g[1] + matrix[r][2] * g[2]
                for r in range(3)
            ]
            new.append(primitive_vector(img))
        return Cone(tuple(sorted(new)))


def cones_fast_disjoint(a: Cone, b: Cone) -> bool:
    """Cheap certified disjointness: one cone lies strictly on the wrong side
    of a defining form of the other. False means undecided."""
    for f in a.pos_forms:
        if all(_dot(f, g) < 0 for g in b.gens):
            return True
    for e in a.eq_forms:
        s = [_sign(_dot(e, g)) for g in b.gens]
        if all(v > 0 for v in s) or all(v < 0 for v in s):
            return True
    for f in b.pos_forms:
        if all(_dot(f, g) < 0 for g in a.gens):
            return True
    for e in b.eq_forms:
        s = [_sign(_dot(e, g)) for g in a.gens]
        if all(v > 0 for v in s) or all(v < 0 for v in s):
            return True
    return False


@dataclass(frozen=True)
class ShintaniSet:
    """Finite disjoint union of relatively open simplicial cones, stored in a
    canonical cell order for deterministic serialization."""

    cones: tuple[Cone, ...]

    @classmethod
    def from_cones(cls, cones) -> "ShintaniSet":
        return cls(tuple(sorted(cones, key=lambda c: (len(c.gens), c.gens))))

    @property
    def is_empty(self) -> bool:
        return not self.cones

    def contains_vec(self, x) -> bool:
        return any(c.contains_vec(x) for c in self.cones)

    def __iter__(self):
        return iter(self.cones)

    def __len__(self):
        return len(self.cones)


# -- splitting and re-triangulation -------------------------------------------


def split_cell(cone: Cone, form, trace_form):
    """Split an open cell by the hyperplane {form = 0} into (neg, zero, pos)
    lists of open cells."""
    gens = cone.gens
    svals = [_dot(form, g) for g in gens]
    signs = [_sign(v) for v in svals]
    if all(s >= 0 for s in signs):
        if any(s > 0 for s in signs):
            return [], [], [cone]
        return [], [cone], []
    if all(s <= 0 for s in signs):
        return [cone], [], []
    # mixed: edges crossing the hyperplane contribute new boundary rays
    cut = []
    for i in range(len(gens)):
        for j in range(len(gens)):
            if signs[i] > 0 > signs[j]:
                u = tuple(
                    svals[i] * gens[j][k] - svals[j] * gens[i][k] for k in range(3)
                )
                cut.append(primitive_vector(u))
    pos_rays = [g for g, s in zip(gens, signs) if s >= 0] + cut
    neg_rays = [g for g, s in zip(gens, signs) if s <= 0] + cut
    zero_rays = [g for g, s in zip(gens, signs) if s == 0] + cut
    return (
        decompose_rays(neg_rays, trace_form),
        decompose_rays(zero_rays, trace_form),
        decompose_rays(pos_rays, trace_form),
    )


def decompose_rays(rays, trace_form) -> list[Cone]:
    """Disjoint open simplicial cells whose union is the relative interior of
    the cone generated by `rays` (all rays must have positive trace)."""
    canon = sorted({primitive_vector(r) for r in rays})
    if not canon:
        return []
    rank = _rank(canon)
    if rank == 1:
        assert len(canon) == 1, "opposite rays cannot both have positive trace"
        return [Cone((canon[0],))]

    tvals = [Fraction(_dot(trace_form, r)) for r in canon]
    assert all(t > 0 for t in tvals)
    a = next(i for i in range(3) if trace_form[i] != 0)
    b, c = (i for i in range(3) if i != a)
    pts = [(Fraction(r[b]) / t, Fraction(r[c]) / t) for r, t in zip(canon, tvals)]

    if rank == 2:
        base = pts[0]
        dvec = next((p[0] - base[0], p[1] - base[1]) for p in pts if p != base)
        lam = [(p[0] - base[0]) * dvec[0] + (p[1] - base[1]) * dvec[1] for p in pts]
        imin = min(range(len(lam)), key=lambda i: lam[i])
        imax = max(range(len(lam)), key=lambda i: lam[i])
        return [Cone(tuple(sorted((canon[imin], canon[imax]))))]

    hull = _convex_hull(list(zip(pts, canon)))
    k = len(hull)
    h0 = hull[0]
    cells = [Cone(tuple(sorted((h0, hull[i], hull[i + 1])))) for i in range(1, k - 1)]
    cells += [Cone(tuple(sorted((h0, hull[i])))) for i in range(2, k - 1)]
    return cells


def _convex_hull(tagged):
    """Monotone chain on exact rational points; returns the rays of the hull
    vertices in cyclic order (collinear and interior points dropped)."""
    tagged = sorted(tagged, key=lambda t: t[0])

    def cross(o, p, q):
        return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])

    lower: list = []
    for t in tagged:
        while len(lower) >= 2 and cross(lower[-2][0], lower[-1][0], t[0]) <= 0:
            lower.pop()
        lower.append(t)
    upper: list = []
    for t in reversed(tagged):
        while len(upper) >= 2 and cross(upper[-2][0], upper[-1][0], t[0]) <= 0:
            upper.pop()
        upper.append(t)
    hull = lower[:-1] + upper[:-1]
    return [t[1] for t in hull]


def intersect_cells(a: Cone, b: Cone, trace_form) -> list[Cone]:
    """Exact intersection of two open cells as disjoint open cells (carves
    `a` by the defining forms of `b`)."""
    if cones_fast_disjoint(a, b):
        return []
    pieces = [a]
    for e in b.eq_forms:
        pieces = [z for p in pieces for z in split_cell(p, e, trace_form)[1]]
        if not pieces:
            return []
    for f in b.pos_forms:
        pieces = [q for p in pieces for q in split_cell(p, f, trace_form)[2]]
        if not pieces:
            return []
    return pieces


def diff_cell(a: Cone, b: Cone, trace_form) -> list[Cone]:
    """Exact difference a \\ b as disjoint open cells."""
    if cones_fast_disjoint(a, b):
        return [a]
    out: list[Cone] = []
    pieces = [a]
    for e in b.eq_forms:
        nxt: list[Cone] = []
        for p in pieces:
            neg, zero, pos = split_cell(p, e, trace_form)
            out.extend(neg)
            out.extend(pos)
            nxt.extend(zero)
        pieces = nxt
    for f in b.pos_forms:
        nxt = []
        for p in pieces:
            neg, zero, pos = split_cell(p, f, trace_form)
            out.extend(neg)
            out.extend(zero)
            nxt.extend(pos)
        pieces = nxt
    return out


# -- the geometry engine -------------------------------------------------------


@dataclass
class CoverBox:
    """Minimal translate box covering x^-1 D, anchored at the overlap-support
    minimum (replacing x by the anchor's unit multiple shifts the box to the
    origin)."""

    alpha: tuple[int, int]
    anchor: tuple[int, int]
    base_units: tuple[FieldElement, FieldElement]
    support: tuple[tuple[int, int], ...]


@dataclass
class FDReport:
    passed: bool
    samples: int
    bad_samples: list
    boundary_hits: list
    seed: int


class Geometry:
    """Exact Shintani set operations bound to one field and one embedding
    labeling."""

    def __init__(self, emb: RealEmbeddings, cfg: SignConfig | None = None):
        self.emb = emb
        self.spec: FieldSpec = emb.spec
        self.cfg = cfg or SignConfig()
        self.trace_form = primitive_vector(self.spec.trace_basis)

    # -- constructors -------------------------------------------------------

    def cone(self, *elems: FieldElement) -> Cone:
        for e in elems:
            if not self.emb.is_totally_positive(e, self.cfg):
                raise NotTotallyPositive(f"cone generator {e!r} is not totally positive")
        return Cone.from_rays([e.coords for e in elems])

    def shintani_set(self, cones, check: bool = True) -> ShintaniSet:
        s = ShintaniSet.from_cones(cones)
        if check:
            bad = self.find_overlap(s)
            if bad is not None:
                raise DegenerateGeometry(f"cells overlap: {bad[0]!r} and {bad[1]!r}")
        return s

    def find_overlap(self, s: ShintaniSet):
        cells = s.cones
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                if cones_fast_disjoint(cells[i], cells[j]):
                    continue
                if intersect_cells(cells[i], cells[j], self.trace_form):
                    return (cells[i], cells[j])
        return None

    def element_of_vec(self, v) -> FieldElement:
        return FieldElement(self.spec, tuple(Fraction(x) for x in v))

    # -- membership and sampling --------------------------------------------

    def member(self, x: FieldElement, target) -> bool:
        if x.is_zero():
            raise ValueError("membership is defined for nonzero elements")
        return target.contains_vec(_int_vec(x.coords))

    def sample_point(self, s) -> FieldElement:
        if isinstance(s, Cone):
            return self.element_of_vec(s.witness_vec())
        if s.is_empty:
            raise EmptySet("no cells to sample")
        return self.element_of_vec(s.cones[0].witness_vec())

    def sample_in_intersection(self, c1: Cone, c2: Cone) -> FieldElement:
        cells = intersect_cells(c1, c2, self.trace_form)
        if not cells:
            raise EmptySet("cones do not intersect")
        return self.element_of_vec(cells[0].witness_vec())

    # -- set algebra ---------------------------------------------------------

    def scale(self, s: ShintaniSet, u: FieldElement) -> ShintaniSet:
        if not self.emb.is_totally_positive(u, self.cfg):
            raise NotTotallyPositive("scaling element must be totally positive")
        m = u.mul_matrix()
        return ShintaniSet.from_cones([c.translate(m) for c in s.cones])

    def intersect(self, s1: ShintaniSet, s2: ShintaniSet) -> ShintaniSet:
        out = []
        for a in s1.cones:
            for b in s2.cones:
                out.extend(intersect_cells(a, b, self.trace_form))
        return ShintaniSet.from_cones(out)

    def difference(self, s1: ShintaniSet, s2: ShintaniSet) -> ShintaniSet:
        pieces = list(s1.cones)
        for b in s2.cones:
            pieces = [q for p in pieces for q in diff_cell(p, b, self.trace_form)]
            if not pieces:
                break
        return ShintaniSet.from_cones(pieces)

    def union(self, s1: ShintaniSet, s2: ShintaniSet) -> ShintaniSet:
        extra = self.difference(s2, s1)
        return ShintaniSet.from_cones(list(s1.cones) + list(extra.cones))

    def subset(self, s1: ShintaniSet, s2: ShintaniSet):
        """(True, None) or (False, witness FieldElement in s1 \\ s2)."""
        for a in s1.cones:
            pieces = [a]
            for b in s2.cones:
                pieces = [q for p in pieces for q in diff_cell(p, b, self.trace_form)]
                if not pieces:
                    break
            if pieces:
                return False, self.element_of_vec(pieces[0].witness_vec())
        return True, None

    def set_equal(self, s1: ShintaniSet, s2: ShintaniSet):
        ok, w = self.subset(s1, s2)
        if not ok:
            return False, w
        return self.subset(s2, s1)

    def overlap(self, s1: ShintaniSet, s2: ShintaniSet) -> bool:
        for a in s1.cones:
            for b in s2.cones:
                if cones_fast_disjoint(a, b):
                    continue
                if intersect_cells(a, b, self.trace_form):
                    return True
        return False

    # -- perturbed closures and domains ---------------------------------------

    def perturbed_closure(self, c: Cone) -> ShintaniSet:
        """The cone plus the open faces entered by an infinitesimal
        perturbation along e1 (the first embedding slot)."""
        gens_e = [self.element_of_vec(g) for g in c.gens]
        if c.dim < 3:
            if self.emb.e1_outside_span(gens_e, self.cfg):
                return ShintaniSet.from_cones([c])
            raise DegenerateGeometry("e1 inside the span of a low-dimensional cone")
        d = self.emb.e1_coordinate_signs(gens_e, self.cfg)
        neg = {i for i in range(3) if d[i] < 0}
        cells = [c]
        for t in ((0,), (1,), (2,), (0, 1), (0, 2), (1, 2)):
            if neg <= set(t):
                cells.append(Cone(tuple(sorted(c.gens[i] for i in t))))
        return ShintaniSet.from_cones(cells)

    def bracket(self, x1: FieldElement, x2: FieldElement) -> Cone:
        """C([x1 | x2]) = C(1, x1, x1*x2)."""
        return self.cone(self.spec.one, x1, x1 * x2)

    def colmez_domain(self, eps1: FieldElement, eps2: FieldElement) -> ShintaniSet:
        d12 = self.emb.delta_bracket(eps1, eps2, self.cfg)
        d21 = self.emb.delta_bracket(eps2, eps1, self.cfg)
        if d12 != 1 or d21 != -1:
            raise SignConditionFailed(
                f"delta([e1|e2])={d12}, delta([e2|e1])={d21}; need +1, -1"
            )
        cells = list(self.perturbed_closure(self.bracket(eps1, eps2)).cones)
        cells += list(self.perturbed_closure(self.bracket(eps2, eps1)).cones)
        return self.shintani_set(cells, check=True)

    def _check_pi_signs(self, eps: FieldElement, pi: FieldElement, label: str):
        dp = self.emb.delta_bracket(eps, pi, self.cfg)
        dm = self.emb.delta_bracket(pi, eps, self.cfg)
        if dp == 0 or dp != -dm:
            raise SignConditionFailed(
                f"delta([{label}|pi])={dp}, delta([pi|{label}])={dm}; "
                "need opposite nonzero signs"
            )

    def explicit_B(self, eps1: FieldElement, eps2: FieldElement) -> ShintaniSet:
        d12 = self.emb.delta_bracket(eps1, eps2, self.cfg)
        d21 = self.emb.delta_bracket(eps2, eps1, self.cfg)
        if d12 != 1 or d21 != -1:
            raise SignConditionFailed(
                f"delta([e1|e2])={d12}, delta([e2|e1])={d21}; need +1, -1"
            )
        one = self.spec.one
        e12 = eps1 * eps2
        cells = [
            self.cone(one),
            self.cone(one, eps1),
            self.cone(one, eps2),
            self.cone(one, e12),
            self.cone(one, eps1, e12),
            self.cone(one, eps2, e12),
        ]
        return self.shintani_set(cells, check=True)

    def explicit_B1(self, eps2: FieldElement, pi: FieldElement) -> ShintaniSet:
        self._check_pi_signs(eps2, pi, "e2")
        one = self.spec.one
        e2pi = eps2 * pi
        cells = [
            self.cone(pi),
            self.cone(pi, e2pi),
            self.cone(one, pi),
            self.cone(one, e2pi),
            self.cone(one, eps2, e2pi),
            self.cone(one, pi, e2pi),
        ]
        return self.shintani_set(cells, check=True)

    def explicit_B2(self, eps1: FieldElement, pi: FieldElement) -> ShintaniSet:
        self._check_pi_signs(eps1, pi, "e1")
        one = self.spec.one
        e1pi = eps1 * pi
        cells = [
            self.cone(pi),
            self.cone(pi, e1pi),
            self.cone(one, pi),
            self.cone(one, e1pi),
            self.cone(one, eps1, e1pi),
            self.cone(one, pi, e1pi),
        ]
        return self.shintani_set(cells, check=True)

    # -- translates, covers, supports -----------------------------------------

    def _translates(self, d: ShintaniSet, u1: FieldElement, u2: FieldElement, window: int):
        p1 = _powers(u1, window)
        p2 = _powers(u2, window)
        out = {}
        for k1 in range(-window, window + 1):
            for k2 in range(-window, window + 1):
                m = (p1[k1] * p2[k2]).mul_matrix()
                out[(k1, k2)] = [c.translate(m) for c in d.cones]
        return out

    def _overlap_support(self, d, x, u1, u2, window):
        """All k in the window with u1^k1 u2^k2 D meeting x^-1 D."""
        xinv_m = x.inverse().mul_matrix()
        target = [c.translate(xinv_m) for c in d.cones]
        hits = []
        for k, cells in self._translates(d, u1, u2, window).items():
            if self._lists_overlap(cells, target):
                hits.append(k)
        return hits

    def _lists_overlap(self, cells1, cells2) -> bool:
        for a in cells1:
            for b in cells2:
                if cones_fast_disjoint(a, b):
                    continue
                if intersect_cells(a, b, self.trace_form):
                    return True
        return False

    def error_support(
        self,
        d: ShintaniSet,
        pi: FieldElement,
        u1: FieldElement,
        u2: FieldElement,
        window: int = 8,
    ) -> list[tuple[int, int]]:
        hits = self._overlap_support(d, pi, u1, u2, window)
        if any(abs(k1) == window or abs(k2) == window for k1, k2 in hits):
            raise WindowExceeded(f"support touches the window boundary: {sorted(hits)}")
        return sorted(hits)

    def translation_cover(
        self,
        d: ShintaniSet,
        x: FieldElement,
        u1: FieldElement,
        u2: FieldElement,
        window: int = 8,
    ) -> CoverBox:
        if not self.emb.is_totally_positive(x, self.cfg):
            raise NotTotallyPositive("cover target must be totally positive")
        hits = self._overlap_support(d, x, u1, u2, window)
        if not hits:
            raise WindowExceeded("x^-1 D meets no translate inside the window")
        if any(abs(k1) == window or abs(k2) == window for k1, k2 in hits):
            raise WindowExceeded(f"support touches the window boundary: {sorted(hits)}")
        k1s = [k1 for k1, _ in hits]
        k2s = [k2 for _, k2 in hits]
        anchor = (min(k1s), min(k2s))
        alpha = (max(k1s) - anchor[0], max(k2s) - anchor[1])
        return CoverBox(
            alpha=alpha, anchor=anchor, base_units=(u1, u2), support=tuple(sorted(hits))
        )

    # -- tiling check ----------------------------------------------------------

    def fundamental_domain_check(
        self,
        d: ShintaniSet,
        u1: FieldElement,
        u2: FieldElement,
        samples: int = 1000,
        window: int = 8,
        seed: int = 0,
    ) -> FDReport:
        """Seeded sampling check that the window translates of D hit each
        random totally positive point exactly once.

        Points are positive rational combinations of the spanning triple
        (1, u1, u1*u2); each point's hit set over the whole window is decided
        exactly by integer evaluation of the translates' defining forms.
        """
        translates = self._translates(d, u1, u2, window)
        rng = random.Random(seed)
        one = self.spec.one
        triple = (one, u1, u1 * u2)
        bad = []
        boundary = []
        for _ in range(samples):
            coeffs = [Fraction(rng.randint(1, 999), rng.randint(1, 999)) for _ in range(3)]
            x = self.spec.zero
            for q, v in zip(coeffs, triple):
                x = x + v.scalar_mul(q)
            xv = _int_vec(x.coords)
            hits = [
                k
                for k, cells in translates.items()
                if any(c.contains_vec(xv) for c in cells)
            ]
            if len(hits) != 1:
                bad.append((x.coords, sorted(hits)))
            for k1, k2 in hits:
                if abs(k1) == window or abs(k2) == window:
                    boundary.append(((k1, k2), x.coords))
        return FDReport(
            passed=not bad and not boundary,
            samples=samples,
            bad_samples=bad,
            boundary_hits=boundary,
            seed=seed,
        )

    # -- the explicit Shintani-set identities -----------------------------------

    def prop4_union(self, eps1: FieldElement, eps2: FieldElement) -> ShintaniSet:
        """C([e1|e2]) u C([e2|e1]) u C(1, e1*e2): where a normalized pi^-1
        must lie."""
        one = self.spec.one
        return ShintaniSet.from_cones(
            [
                self.bracket(eps1, eps2),
                self.bracket(eps2, eps1),
                self.cone(one, eps1 * eps2),
            ]
        )

    def classify_case(
        self, eps1: FieldElement, eps2: FieldElement, pi: FieldElement, window: int = 8
    ) -> tuple[str, CoverBox]:
        b = self.explicit_B(eps1, eps2)
        box = self.translation_cover(b, pi, eps1, eps2, window)
        a1, a2 = box.alpha
        if a1 <= 1 and a2 <= 1:
            return "case1", box
        if a1 <= 1 and a2 == 2:
            return "case2", box
        raise InclusionViolated(f"cover box {box.alpha} exceeds the guaranteed (1,2) block")

    def verify_identity(
        self,
        case: str,
        which: str,
        eps1: FieldElement,
        eps2: FieldElement,
        pi: FieldElement,
        window: int = 8,
    ):
        """Exact check of one of the displayed Shintani-set equalities.

        `case` is "case1" or "case2"; `which` is "id1", "id2" or
        "case2extra". Returns (True, None) or (False, witness).
        """
        if case not in ("case1", "case2") or which not in ("id1", "id2", "case2extra"):
            raise ValueError("unknown case or identity tag")
        pinv = pi.inverse()
        if not self.prop4_union(eps1, eps2).contains_vec(_int_vec(pinv.coords)):
            raise SignConditionFailed(
                "pi is not normalized: pi^-1 lies outside C([e1|e2]) u C([e2|e1]) u C(1,e1e2)"
            )
        actual_case, _ = self.classify_case(eps1, eps2, pi, window)
        if actual_case != case:
            raise CaseMismatch(f"configuration classifies as {actual_case}, not {case}")
        if which == "case2extra" and case != "case2":
            raise CaseMismatch("the extra identity only exists in case 2")

        b = self.explicit_B(eps1, eps2)
        e12 = eps1 * eps2

        def translate_meet_b(u: FieldElement) -> ShintaniSet:
            part = self.intersect(self.scale(b, u), self.scale(b, pinv))
            return self.scale(part, u.inverse())

        if which == "id1":
            b1 = self.explicit_B1(eps2, pi)
            pinv_b1 = self.scale(b1, pinv)
            lhs = self.union(
                self.intersect(pinv_b1, b),
                self.scale(self.intersect(pinv_b1, self.scale(b, eps2)), eps2.inverse()),
            )
            kmax = 1 if case == "case1" else 2
            rhs = ShintaniSet.from_cones([])
            for k2 in range(kmax + 1):
                rhs = self.union(rhs, translate_meet_b(eps1 * eps2**k2))
            return self.set_equal(lhs, rhs)

        if which == "id2":
            b2 = self.explicit_B2(eps1, pi)
            pinv_b2 = self.scale(b2, pinv)
            lhs = self.union(
                self.intersect(pinv_b2, b),
                self.scale(self.intersect(pinv_b2, self.scale(b, eps1)), eps1.inverse()),
            )
            k2s = (1,) if case == "case1" else (1, 2)
            rhs = ShintaniSet.from_cones([])
            for k1 in (0, 1):
                for k2 in k2s:
                    rhs = self.union(rhs, translate_meet_b(eps1**k1 * eps2**k2))
            return self.set_equal(lhs, rhs)

        # extra leftover of the case-2 bookkeeping:
        # (e2 B u e1e2 B) n pi^-1 B2  =  e2^-1 ((e2^2 B u e1 e2^2 B) n pi^-1 B)
        b2 = self.explicit_B2(eps1, pi)
        lhs = self.intersect(
            self.union(self.scale(b, eps2), self.scale(b, e12)), self.scale(b2, pinv)
        )
        ee = eps2 * eps2
        rhs = self.scale(
            self.intersect(
                self.union(self.scale(b, ee), self.scale(b, eps1 * ee)),
                self.scale(b, pinv),
            ),
            eps2.inverse(),
        )
        return self.set_equal(lhs, rhs)

    def case2extra_reference(
        self, eps1: FieldElement, eps2: FieldElement, pi: FieldElement
    ) -> ShintaniSet:
        """The four-cell value both sides of the extra identity reduce to,
        built from the two auxiliary ray points."""
        pinv = pi.inverse()
        e12 = eps1 * eps2
        alpha = self.sample_in_intersection(
            self.cone(pinv, eps1 * pinv), self.cone(eps2, e12)
        )
        beta = self.sample_in_intersection(
            self.cone(pinv, eps1 * pinv), self.cone(e12, eps1 * e12)
        )
        return ShintaniSet.from_cones(
            [
                self.cone(e12),
                self.cone(alpha, e12),
                self.cone(e12, beta),
                self.cone(alpha, e12, beta),
            ]
        )


def _powers(u: FieldElement, window: int) -> dict[int, FieldElement]:
    out = {0: u.spec.one}
    if window:
        inv = u.inverse()
        for k in range(1, window + 1):
            out[k] = out[k - 1] * u
            out[-k] = out[-(k - 1)] * inv
    return out


def _int_vec(coords) -> Vec:
    den = 1
    for c in coords:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return tuple(int(c * den) for c in coords)  # type: ignore[return-value]
