"""Fans, torus-invariant divisors, section lattices, and transfer.

Cones and fans are exact integer-lattice objects; all of the polyhedral
work (dualization, face enumeration, membership) runs in rational
arithmetic over generators of small rank, which is the regime the
varieties here live in: projective spaces and products of them.  On top
of the combinatorics sit the section spaces of torus-invariant divisors
(including fractional ones on the p-divided character lattice), the
coordinatewise p-power map of the Frobenius tower, and the transfer of
a hypersurface section to the characteristic-p side with its p-power
integralization.
"""

from __future__ import annotations

import json
from collections import Counter
from fractions import Fraction
from itertools import combinations, product
from math import ceil, floor, gcd

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form

from .arith import ConfigError, FieldConfig, KernelError, UntiltElement
from .tatealg import (
    ClassicalPoint,
    ContractReport,
    GaussPoint,
    HomogeneousElement,
    Monomial,
    approximate,
    verify_contract,
)


class ConeError(KernelError):
    """Polyhedral-data violation: bad cone, fan, or section polytope."""


# =====================================================================
# Exact linear algebra helpers
# =====================================================================

def _as_vector(v, rank: int) -> tuple[int, ...]:
    try:
        tup = tuple(int(c) for c in v)
    except (TypeError, ValueError) as exc:
        raise ConeError(f"not an integer vector: {v!r}") from exc
    if len(tup) != rank:
        raise ConeError(f"vector {tup} has length {len(tup)}, expected "
                        f"{rank}")
    return tup


def _primitive(v: tuple[int, ...]) -> tuple[int, ...] | None:
    g = 0
    for c in v:
        g = gcd(g, abs(c))
    if g == 0:
        return None
    return tuple(c // g for c in v)


def _dot(u, v) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def _gauss_solve(rows, rhs) -> list[Fraction] | None:
    """Exact solution of a square system; None when singular."""
    n = len(rows)
    M = [[Fraction(c) for c in row] + [Fraction(rhs[i])]
         for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col]
        M[col] = [x / inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def _matrix_rank(rows) -> int:
    if not rows:
        return 0
    M = [[Fraction(c) for c in row] for row in rows]
    rank = 0
    for col in range(len(M[0])):
        piv = next((r for r in range(rank, len(M)) if M[r][col] != 0),
                   None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = M[rank][col]
        M[rank] = [x / inv for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank


def _solve_conic(columns, target) -> bool:
    """Whether target is a nonnegative combination of the columns.

    Solves the normal equations exactly, then verifies consistency, so
    linearly dependent column sets simply report False and are covered
    by another subset of the caller's enumeration.
    """
    s = len(columns)
    k = len(target)
    ata = [[sum(Fraction(columns[i][r]) * columns[j][r]
                for r in range(k)) for j in range(s)] for i in range(s)]
    atb = [sum(Fraction(columns[i][r]) * target[r] for r in range(k))
           for i in range(s)]
    lam = _gauss_solve(ata, atb)
    if lam is None:
        return False
    for r in range(k):
        if sum(lam[i] * columns[i][r] for i in range(s)) != target[r]:
            return False
    return all(x >= 0 for x in lam)


def _in_cone(vec, gens, rank: int) -> bool:
    """Exact membership of vec in the cone spanned by gens.

    Any cone element is a nonnegative combination of at most rank
    linearly independent generators, so small subsets suffice.
    """
    if all(c == 0 for c in vec):
        return True
    if not gens:
        return False
    for size in range(1, rank + 1):
        for sub in combinations(gens, size):
            if _solve_conic(sub, vec):
                return True
    return False


def _is_pointed(gens, rank: int) -> bool:
    # a line inside the cone is the same thing as a nontrivial
    # nonnegative combination of generators summing to zero, i.e. the
    # origin lying in the convex hull of some small generator subset
    for size in range(2, min(len(gens), rank + 1) + 1):
        for sub in combinations(gens, size):
            lifted = [v + (1,) for v in sub]
            target = (0,) * rank + (1,)
            if _solve_conic(lifted, target):
                return False
    return True


def _irredundant(gens, rank: int) -> list:
    out = sorted(set(gens))
    changed = True
    while changed:
        changed = False
        for v in list(out):
            rest = [w for w in out if w != v]
            if rest and _in_cone(v, rest, rank):
                out.remove(v)
                changed = True
    return out


def _nullspace_basis(rows, width: int) -> list[tuple[Fraction, ...]]:
    M = [[Fraction(c) for c in row] for row in rows]
    pivots = []
    rank = 0
    for col in range(width):
        piv = next((r for r in range(rank, len(M)) if M[r][col] != 0),
                   None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = M[rank][col]
        M[rank] = [x / inv for x in M[rank]]
        for r in range(len(M)):
            if r != rank and M[r][col] != 0:
                f = M[r][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    for free in range(width):
        if free in pivots:
            continue
        vec = [Fraction(0)] * width
        vec[free] = Fraction(1)
        for r, pcol in enumerate(pivots):
            vec[pcol] = -M[r][free]
        basis.append(tuple(vec))
    return basis


def _nullspace_vectors(vectors, rank: int) -> list[tuple[int, ...]]:
    out = []
    for col in _nullspace_basis(vectors, rank):
        denom = 1
        for c in col:
            denom = denom * c.denominator // gcd(denom, c.denominator)
        vec = _primitive(tuple(int(c * denom) for c in col))
        if vec is not None:
            out.append(vec)
    return out


def _cross(u, v) -> tuple[int, int, int]:
    return (u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0])


def _nonneg_solutions(vectors, rank: int) -> list[tuple[int, ...]]:
    """Generators of {u : <u, v> >= 0 for all v}, rank <= 3.

    Candidate rays come from the constraint-hyperplane intersections
    (perpendiculars in rank 2, pairwise cross products in rank 3), the
    lineality space, and the vectors themselves; filtering and pruning
    leave an irredundant generating set.
    """
    if rank > 3:
        raise ConeError(f"half-space intersection supports rank <= 3, "
                        f"got {rank}")
    basis = [tuple(1 if j == i else 0 for j in range(rank))
             for i in range(rank)]
    if not vectors:
        return [v for b in basis for v in (b, tuple(-c for c in b))]
    cands: list[tuple[int, ...]] = []
    pool = list(vectors) + _nullspace_vectors(vectors, rank)
    for v in pool:
        cands.append(v)
        cands.append(tuple(-c for c in v))
    if rank == 2:
        for v in vectors:
            cands.append((-v[1], v[0]))
            cands.append((v[1], -v[0]))
    elif rank == 3:
        for u, v in combinations(pool, 2):
            w = _cross(u, v)
            cands.append(w)
            cands.append(tuple(-c for c in w))
    valid = []
    for c in cands:
        cp = _primitive(c)
        if cp is None or cp in valid:
            continue
        if all(_dot(cp, v) >= 0 for v in vectors):
            valid.append(cp)
    return _irredundant(valid, rank)


# =====================================================================
# Cones
# =====================================================================

class Cone:
    """A rational polyhedral cone given by generators in Z^rank.

    Generators are normalized to primitive, irredundant, sorted form,
    so equal cones compare equal structurally.  Construction rejects
    cones containing a line unless pointed=False is passed (dual cones
    of lower-dimensional cones are genuinely not pointed).
    """

    __slots__ = ("rank", "generators", "pointed")

    def __init__(self, rank: int, generators, *, pointed: bool = True):
        if not isinstance(rank, int) or rank < 1:
            raise ConeError(f"rank must be a positive integer, got {rank!r}")
        raw = []
        for v in generators:
            vec = _primitive(_as_vector(v, rank))
            if vec is not None:
                raw.append(vec)
        gens = tuple(_irredundant(raw, rank))
        is_pointed = _is_pointed(gens, rank) if gens else True
        if pointed and not is_pointed:
            raise ConeError(
                f"generators {gens} span a cone containing a line "
                f"through the origin")
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "pointed", is_pointed)

    def __setattr__(self, name, value):
        raise AttributeError("cones are immutable")

    @property
    def dim(self) -> int:
        return _matrix_rank(self.generators)

    def contains(self, vec) -> bool:
        return _in_cone(tuple(vec), self.generators, self.rank)

    def faces(self) -> list["Cone"]:
        """All faces, the cone itself and the minimal face included.

        Simplicial cones (any rank) have exactly the generator subsets
        as faces.  Otherwise a face is the zero locus of a supporting
        functional, and summing subsets of the dual generators reaches
        the relative interior of every dual face, hence every face
        downstairs; that route runs through half-space intersection and
        is capped at rank 3.
        """
        if not self.generators:
            return [self]
        if self.pointed and self.dim == len(self.generators):
            return [Cone(self.rank, sub, pointed=True)
                    for r in range(len(self.generators) + 1)
                    for sub in combinations(self.generators, r)]
        duals = _nonneg_solutions(self.generators, self.rank)
        seen: dict[tuple, Cone] = {}
        for r in range(len(duals) + 1):
            for sub in combinations(duals, r):
                u = tuple(sum(col) for col in zip(*sub)) if sub \
                    else (0,) * self.rank
                fgens = tuple(v for v in self.generators
                              if _dot(u, v) == 0)
                if fgens not in seen:
                    seen[fgens] = Cone(self.rank, fgens,
                                       pointed=self.pointed)
        return list(seen.values())

    def __eq__(self, other):
        if not isinstance(other, Cone):
            return NotImplemented
        return (self.rank, self.generators) == (other.rank,
                                                other.generators)

    def __hash__(self):
        return hash((self.rank, self.generators))

    def to_json(self) -> list:
        return [list(v) for v in self.generators]

    def __repr__(self):
        return f"<cone {list(self.generators)} in Z^{self.rank}>"


def dual_cone(cone: Cone) -> Cone:
    """The cone of functionals nonnegative on the input.

    General cones are handled through half-space intersection up to
    rank 3; in higher rank only full-dimensional simplicial cones are
    supported, where the dual generators are the rows of the inverse
    generator matrix.
    """
    if not isinstance(cone, Cone):
        raise ConeError(f"not a cone: {cone!r}")
    if cone.rank <= 3:
        gens = _nonneg_solutions(cone.generators, cone.rank)
        return Cone(cone.rank, gens, pointed=False)
    if len(cone.generators) != cone.rank:
        raise ConeError(
            f"dual cones above rank 3 need full-dimensional simplicial "
            f"input; got {len(cone.generators)} generators in rank "
            f"{cone.rank}")
    gens = []
    for j in range(cone.rank):
        unit = [Fraction(1) if i == j else Fraction(0)
                for i in range(cone.rank)]
        col = _gauss_solve(cone.generators, unit)
        if col is None:
            raise ConeError("generators are linearly dependent")
        denom = 1
        for c in col:
            denom = denom * c.denominator // gcd(denom, c.denominator)
        gens.append(tuple(int(c * denom) for c in col))
    return Cone(cone.rank, gens, pointed=False)


# =====================================================================
# Fans
# =====================================================================

class Fan:
    """A finite face-closed collection of pointed cones.

    Construction closes the input under faces (so listing only maximal
    cones is fine) and checks that every pairwise intersection of
    maximal cones is a common face, reporting the offending pair
    otherwise.
    """

    __slots__ = ("rank", "cones", "maximal_cones")

    def __init__(self, rank: int, cones):
        built = []
        for c in cones:
            if isinstance(c, Cone):
                if c.rank != rank:
                    raise ConeError(f"cone rank {c.rank} does not match "
                                    f"fan rank {rank}")
                built.append(c)
            else:
                built.append(Cone(rank, c))
        if not built:
            raise ConeError("a fan needs at least one cone")
        closed: dict[Cone, Cone] = {}
        for c in built:
            for f in c.faces():
                closed[f] = f
        allc = sorted(closed, key=lambda c: (len(c.generators),
                                             c.generators))
        maximal = [c for c in allc
                   if not any(o is not c and _subcone(c, o) for o in allc)]
        face_pool = set()
        for m in maximal:
            face_pool.update(m.faces())
        for c in allc:
            if c not in face_pool:
                host = next(o for o in maximal if _subcone(c, o))
                raise ConeError(
                    f"cone {list(c.generators)} lies inside "
                    f"{list(host.generators)} without being a face of it")
        for a, b in combinations(maximal, 2):
            defect = _intersection_defect(a, b, rank)
            if defect is not None:
                raise ConeError(
                    f"cones {list(a.generators)} and {list(b.generators)} "
                    f"{defect}")
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "cones", tuple(allc))
        object.__setattr__(self, "maximal_cones", tuple(maximal))

    def __setattr__(self, name, value):
        raise AttributeError("fans are immutable")

    @property
    def rays(self) -> tuple[tuple[int, ...], ...]:
        return tuple(c.generators[0] for c in self.cones
                     if len(c.generators) == 1 and c.dim == 1)

    def __eq__(self, other):
        if not isinstance(other, Fan):
            return NotImplemented
        return (self.rank, self.cones) == (other.rank, other.cones)

    def __hash__(self):
        return hash((self.rank, self.cones))

    def to_json(self) -> dict:
        return {"rank": self.rank,
                "cones": [c.to_json() for c in self.maximal_cones]}

    @classmethod
    def from_json(cls, data: dict | str) -> "Fan":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(int(data["rank"]), data["cones"])
        except (KeyError, TypeError) as exc:
            raise ConeError(f"malformed fan JSON: {exc}") from exc

    def __repr__(self):
        return (f"<fan in Z^{self.rank}, {len(self.maximal_cones)} maximal "
                f"cones>")


def _subcone(a: Cone, b: Cone) -> bool:
    return all(_in_cone(v, b.generators, b.rank) for v in a.generators)


def _intersect(a: Cone, b: Cone, rank: int) -> Cone:
    da = _nonneg_solutions(a.generators, rank)
    db = _nonneg_solutions(b.generators, rank)
    gens = _nonneg_solutions(sorted(set(da) | set(db)), rank)
    return Cone(rank, gens)


def _intersection_defect(a: Cone, b: Cone, rank: int) -> str | None:
    """None when the intersection is a common face, else a witness.

    Up to rank 3 the intersection is computed outright by double
    dualization.  Above that, cones must be simplicial; a point of the
    overlap beyond the maximal common face F then shows up as a
    generator of one cone reachable inside the other modulo the
    remaining generators, an exact conic-membership question.
    """
    common = [f for f in a.faces() if f in b.faces()]
    maxes = [f for f in common
             if not any(g != f and _subcone(f, g) for g in common)]
    if len(maxes) != 1:
        return (f"share several maximal faces "
                f"{[list(f.generators) for f in maxes]}")
    face = maxes[0]
    if rank <= 3:
        inter = _intersect(a, b, rank)
        if inter != face:
            return (f"meet in {list(inter.generators)}, which is not a "
                    f"common face")
        return None
    for cone in (a, b):
        if cone.dim != len(cone.generators):
            raise ConeError(
                "fans above rank 3 support simplicial cones only")
    fset = set(face.generators)
    for i, gen in enumerate(a.generators):
        if gen in fset:
            continue
        pool = list(b.generators) + [
            tuple(-c for c in v)
            for j, v in enumerate(a.generators) if j != i]
        if _in_cone(gen, pool, rank):
            return (f"overlap along {list(gen)} beyond the common face "
                    f"{list(face.generators)}")
    return None


def validate_fan(cones, rank: int | None = None) -> Fan:
    """Builds a Fan from maximal cones, inferring rank when possible."""
    cones = list(cones)
    if rank is None:
        for c in cones:
            if isinstance(c, Cone):
                rank = c.rank
                break
            if c:
                rank = len(list(c[0]))
                break
    if rank is None:
        raise ConeError("cannot infer the fan rank; pass it explicitly")
    return Fan(rank, cones)


def is_smooth(fan: Fan) -> bool:
    """Every maximal cone's generators extend to a lattice basis."""
    for cone in fan.maximal_cones:
        if not cone.generators:
            continue
        if len(cone.generators) != cone.dim:
            return False
        snf = smith_normal_form(Matrix([list(v) for v in cone.generators]))
        for i in range(len(cone.generators)):
            if abs(snf[i, i]) != 1:
                return False
    return True


def is_complete(fan: Fan) -> bool:
    """Whether the support covers all of R^rank (rank <= 3).

    A fan of full-dimensional cones covers space exactly when it has no
    boundary, i.e. every codimension-1 face lies in precisely two
    maximal cones.
    """
    if fan.rank > 3:
        raise ConeError(f"completeness test supports rank <= 3, got "
                        f"{fan.rank}")
    maximal = fan.maximal_cones
    if not maximal or any(c.dim != fan.rank for c in maximal):
        return False
    facets: Counter = Counter()
    for c in maximal:
        for f in c.faces():
            if f.dim == fan.rank - 1:
                facets[f] += 1
    return bool(facets) and all(n == 2 for n in facets.values())


# =====================================================================
# Divisors and sections
# =====================================================================

class TWeilDivisor:
    """A rational coefficient per ray of the fan.

    Integer coefficients give honest torus-invariant divisors; p-power
    denominators give their fractional counterparts on the p-divided
    character lattice (denominators are validated where a p is in
    play, at section enumeration).
    """

    __slots__ = ("fan", "coefficients")

    def __init__(self, fan: Fan, coefficients):
        if not isinstance(fan, Fan):
            raise ConeError(f"not a fan: {fan!r}")
        rays = fan.rays
        if isinstance(coefficients, dict):
            keyed = {tuple(k): Fraction(v) for k, v in coefficients.items()}
            missing = [r for r in rays if r not in keyed]
            extra = [k for k in keyed if k not in rays]
            if missing or extra:
                raise ConeError(
                    f"coefficients must be indexed exactly by the rays; "
                    f"missing {missing}, extraneous {extra}")
            coeffs = tuple(keyed[r] for r in rays)
        else:
            coeffs = tuple(Fraction(c) for c in coefficients)
            if len(coeffs) != len(rays):
                raise ConeError(
                    f"{len(coeffs)} coefficients for {len(rays)} rays")
        object.__setattr__(self, "fan", fan)
        object.__setattr__(self, "coefficients", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("divisors are immutable")

    def scaled(self, factor) -> "TWeilDivisor":
        factor = Fraction(factor)
        return TWeilDivisor(self.fan,
                            [a * factor for a in self.coefficients])

    def to_json(self) -> dict:
        return {"rays": [list(r) for r in self.fan.rays],
                "coefficients": [str(a) for a in self.coefficients]}

    @classmethod
    def from_json(cls, fan: Fan, data: dict | str) -> "TWeilDivisor":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            coeffs = [Fraction(a) for a in data["coefficients"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConeError(f"malformed divisor JSON: {exc}") from exc
        if "rays" in data:
            given = tuple(tuple(int(c) for c in r) for r in data["rays"])
            if given != fan.rays:
                raise ConeError(
                    f"divisor rays {list(given)} do not match the fan's "
                    f"rays {list(fan.rays)}")
        return cls(fan, coeffs)

    def __repr__(self):
        parts = [f"{a}*D{list(r)}" for a, r in
                 zip(self.coefficients, self.fan.rays) if a != 0]
        return "<divisor " + (" + ".join(parts) or "0") + ">"


def _p_power_denominator(a: Fraction, p: int) -> bool:
    den = a.denominator
    while den % p == 0:
        den //= p
    return den == 1


def sections(fan: Fan, divisor: TWeilDivisor, dencap: int = 0,
             p: int | None = None) -> list[tuple[Fraction, ...]]:
    """Lattice points of the divisor's section polytope.

    The global sections of O(D) are spanned by the characters u with
    <u, v_i> >= -a_i for every ray v_i; dencap m refines the character
    lattice to (1/p^m)-points for the fractional theory.  Enumeration
    is exact: candidate vertices from ray subsets bound a box, and the
    box's grid points are filtered through the defining inequalities.

    Raises:
        ConeError: unbounded polytope, or coefficients off the p-power
            denominator lattice.
    """
    if not isinstance(divisor, TWeilDivisor) or divisor.fan != fan:
        raise ConeError("divisor does not live on this fan")
    if dencap < 0:
        raise ConeError(f"dencap must be nonnegative, got {dencap}")
    if (dencap > 0 or any(a.denominator != 1
                          for a in divisor.coefficients)) and p is None:
        raise ConeError("fractional data needs the prime p")
    if p is not None:
        for a in divisor.coefficients:
            if not _p_power_denominator(a, p):
                raise ConeError(
                    f"coefficient {a} has a denominator not a power of "
                    f"{p}")
    rays = fan.rays
    if not rays:
        raise ConeError("the fan has no rays; the polytope is unbounded")
    recession = _nonneg_solutions(rays, fan.rank)
    if recession:
        raise ConeError(
            f"unbounded polytope: direction {recession[0]} satisfies "
            f"every ray inequality")
    a = divisor.coefficients
    vertices = []
    for idx in combinations(range(len(rays)), fan.rank):
        u = _gauss_solve([rays[i] for i in idx], [-a[i] for i in idx])
        if u is None:
            continue
        cand = tuple(u)
        if all(_dot(cand, rays[i]) >= -a[i] for i in range(len(rays))):
            vertices.append(cand)
    if not vertices:
        return []
    scale = (p ** dencap) if dencap else 1
    lows = [ceil(min(v[j] for v in vertices) * scale)
            for j in range(fan.rank)]
    highs = [floor(max(v[j] for v in vertices) * scale)
             for j in range(fan.rank)]
    out = []
    for grid in product(*(range(lo, hi + 1)
                          for lo, hi in zip(lows, highs))):
        u = tuple(Fraction(z, scale) for z in grid)
        if all(_dot(u, rays[i]) >= -a[i] for i in range(len(rays))):
            out.append(u)
    out.sort()
    return out


# =====================================================================
# Frobenius tower
# =====================================================================

def frobenius_pullback(x, p: int | None = None):
    """Pullback along multiplication by p on the character lattice.

    Section lattice points map to p*u.  Homogeneous coordinate
    elements map termwise: exponent vectors are multiplied by p and
    each coefficient is raised to the p-th power, which on the
    characteristic-p side is exactly the Frobenius.
    """
    if isinstance(x, HomogeneousElement):
        config = x.config
        terms = {
            Monomial(config, [e.as_fraction() * config.p for e in m.exps]):
            c ** config.p
            for m, c in x.terms.items()
        }
        return HomogeneousElement(config, x.kind, x.nvars,
                                  x.degree * config.p, terms)
    if p is None:
        raise ConeError("lattice-point pullback needs the prime p")
    return tuple(Fraction(c) * p for c in x)


# =====================================================================
# Hypersurface transfer
# =====================================================================

def projective_fan(n: int) -> Fan:
    """The standard fan of n-dimensional projective space."""
    if not isinstance(n, int) or n < 1:
        raise ConeError(f"dimension must be a positive integer, got {n!r}")
    rays = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    rays.append((-1,) * n)
    return Fan(n, [list(sub) for sub in combinations(rays, n)])


def _projective_dimension(fan: Fan) -> int | None:
    n = fan.rank
    if fan == projective_fan(n):
        return n
    return None


class TransferResult:
    """Outcome of a hypersurface transfer.

    approximant: the section over the characteristic-p side.
    twist: how many Frobenius twists clear the degree's denominator.
    integralized: approximant twisted that many times (an integer-degree
        regular section).
    report: the pointwise contract verdicts backing the approximant.
    """

    __slots__ = ("approximant", "twist", "integralized", "report")

    def __init__(self, approximant: HomogeneousElement, twist: int,
                 integralized: HomogeneousElement, report: ContractReport):
        object.__setattr__(self, "approximant", approximant)
        object.__setattr__(self, "twist", twist)
        object.__setattr__(self, "integralized", integralized)
        object.__setattr__(self, "report", report)

    def __setattr__(self, name, value):
        raise AttributeError("transfer results are immutable")

    def to_json(self) -> dict:
        return {"g": self.approximant.to_json(),
                "twist": self.twist,
                "h": self.integralized.to_json(),
                "report": self.report.to_json()}


def _transfer_sample(config: FieldConfig, nvars: int, cap: int = 20):
    """Unit-ball coordinate tuples with some coordinate a unit, plus
    the sup-norm point."""
    values = [
        UntiltElement.zero(config),
        UntiltElement.one(config),
        UntiltElement.uniformizer(config),
        UntiltElement.monomial(config, 1, Fraction(1, config.p)),
    ]
    unit = values[1]
    points = [GaussPoint()]
    for combo in product(values, repeat=nvars):
        if len(points) > cap:
            break
        if not any(c is unit for c in combo):
            continue
        points.append(ClassicalPoint(combo))
    return points


def hypersurface_transfer(fan: Fan, f: HomogeneousElement, c,
                          eps) -> TransferResult:
    """Moves a hypersurface section to the characteristic-p side.

    Works in the homogeneous coordinate model of projective space: the
    section f is approximated by a sharp image g of the same degree,
    the contract is verified on a fixed sample of unit-normalized
    coordinate points, and g is Frobenius-twisted until its degree is
    an integer, giving a regular section h = g^(p^twist).

    Raises:
        ConeError: fan is not a projective-space fan matching f's
            variable count, or f is not on the untilt side.
        ApproximationError / precision errors: propagated from the
            approximation loop.
    """
    if not isinstance(f, HomogeneousElement) or f.kind != "untilt":
        raise ConeError("transfer starts from a section over the "
                        "characteristic-0 side")
    n = _projective_dimension(fan)
    if n is None:
        raise ConeError("hypersurface transfer runs on the standard "
                        "projective-space fan")
    if f.nvars != n + 1:
        raise ConeError(
            f"{f.nvars} homogeneous coordinates do not match P^{n}")
    g = approximate(f, c, eps)
    p = f.config.p
    twist = 0
    degree = f.degree
    while (degree * p ** twist).denominator != 1:
        twist += 1
    h = g
    for _ in range(twist):
        h = frobenius_pullback(h)
    sample = _transfer_sample(f.config, f.nvars)
    report = verify_contract(f, g, c, eps, sample)
    return TransferResult(g, twist, h, report)


def complete_intersection_degree(degrees) -> Fraction:
    """Degree of a transverse intersection of hypersurfaces against the
    ample class: the product of the individual degrees.  Each factor
    cuts the dimension by one, so intersecting two transferred
    hypersurfaces is plain bookkeeping on (degree, codimension)."""
    out = Fraction(1)
    for d in degrees:
        out *= Fraction(d)
    return out
