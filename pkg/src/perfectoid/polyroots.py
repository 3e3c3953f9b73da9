"""Newton polygons and root finding over the truncated fields.

Polynomials carry coefficients from a single ring (tilt or untilt side)
and expose the valuation-theoretic toolbox: the Newton polygon with its
root-valuation segments, Hensel lifting of simple residue roots, a
digit-by-digit search for roots in the characteristic-p ring, the
coefficientwise transfer of a tilt polynomial to the untilt side, and
the refinement loop that assembles a mixed-characteristic root from a
sequence of characteristic-p digit solves.

Conventions:
  * polygon segments store the root valuation (the negated hull slope)
    and are listed in increasing order, so the deepest branch is last;
  * roots at X = 0 are split off before the hull is computed and show
    up as ``vanishing_order`` instead of a segment;
  * a coefficient that is zero at its current precision participates
    only as the constraint "valuation >= precexp"; when that constraint
    could still move the hull the polygon is refused as indeterminate.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .arith import (
    INF,
    ConfigError,
    IndeterminateError,
    KernelError,
    TiltElement,
    UntiltElement,
    divide_exact,
    element_from_json,
    reduce_mod_uniformizer,
)
from .tiltkit import sharp, untilt_power_pn


class RootError(KernelError):
    """A root search failed: no convergence, budget, or a bad stage."""


_KIND_CLASS = {"tilt": TiltElement, "untilt": UntiltElement}


class Polynomial:
    """A polynomial with coefficients in one of the two rings.

    Coefficients are stored ascending (index = degree).  The leading
    coefficient must be nonzero at its current precision; lower
    coefficients may be anything, including zero at precision.
    """

    __slots__ = ("config", "kind", "coeffs")

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise KernelError("a polynomial needs at least one coefficient")
        first = coeffs[0]
        if not isinstance(first, (TiltElement, UntiltElement)):
            raise ConfigError(
                f"coefficients must be ring elements, got "
                f"{type(first).__name__}")
        for c in coeffs[1:]:
            if type(c) is not type(first):
                raise ConfigError("coefficients mix tilt and untilt elements")
            if c.config is not first.config and c.config != first.config:
                raise ConfigError("coefficients mix field configurations")
        if coeffs[-1].is_zero():
            raise KernelError(
                "leading coefficient is zero at current precision; "
                "trim the polynomial before constructing it")
        object.__setattr__(self, "config", first.config)
        object.__setattr__(self, "kind", first.kind)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("polynomials are immutable")

    @classmethod
    def trimmed(cls, coeffs) -> "Polynomial":
        """Build a polynomial, dropping trailing zero-at-precision coeffs."""
        coeffs = list(coeffs)
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs.pop()
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def derivative_at(self, x):
        """Evaluate the formal derivative at x without constructing it.

        The derivative itself may have a zero-at-precision leading
        coefficient (characteristic p kills degree multiples of p), so
        it does not always satisfy the Polynomial invariant.
        """
        acc = None
        for i in range(len(self.coeffs) - 1, 0, -1):
            term = self.coeffs[i] * i
            acc = term if acc is None else acc * x + term
        if acc is None:
            raise KernelError("constant polynomial has no derivative roots")
        return acc

    def shifted(self, delta) -> "Polynomial":
        """The polynomial X -> P(X + delta), by binomial re-expansion."""
        d = self.degree
        powers = [self.coeffs[0].__class__.one(self.config)]
        for _ in range(d):
            powers.append(powers[-1] * delta)
        out = []
        for i in range(d + 1):
            acc = None
            for j in range(i, d + 1):
                term = self.coeffs[j] * math.comb(j, i) * powers[j - i]
                acc = term if acc is None else acc + term
            out.append(acc)
        return Polynomial(out)

    def scaled(self, factor) -> "Polynomial":
        """The polynomial X -> P(factor * X)."""
        out = []
        power = self.coeffs[0].__class__.one(self.config)
        for c in self.coeffs:
            out.append(c * power)
            power = power * factor
        return Polynomial(out)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.kind == other.kind and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.kind, self.coeffs))

    def __repr__(self):
        inner = ", ".join(c.to_text() for c in self.coeffs)
        return f"<poly/{self.kind} [{inner}]>"

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        if not isinstance(data, list) or not data:
            raise KernelError("polynomial JSON must be a non-empty array")
        return cls([element_from_json(entry) for entry in data])


class NewtonPolygon:
    """Root valuations of a polynomial, with multiplicities.

    segments: tuple of (root valuation, multiplicity), strictly
    increasing in the valuation.  vanishing_order counts the roots at
    X = 0 (zero constant coefficients at current precision).
    """

    __slots__ = ("segments", "vanishing_order")

    def __init__(self, segments, vanishing_order: int = 0):
        segments = tuple((Fraction(s), int(m)) for s, m in segments)
        for (s1, m1), (s2, _) in zip(segments, segments[1:]):
            if s2 <= s1:
                raise KernelError("polygon slopes must strictly increase")
        for _, m in segments:
            if m < 1:
                raise KernelError("segment multiplicities must be positive")
        if vanishing_order < 0:
            raise KernelError("vanishing order cannot be negative")
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "vanishing_order", int(vanishing_order))

    def __setattr__(self, name, value):
        raise AttributeError("polygons are immutable")

    def slopes(self) -> tuple:
        return tuple(s for s, _ in self.segments)

    def __eq__(self, other):
        if not isinstance(other, NewtonPolygon):
            return NotImplemented
        return (self.segments == other.segments
                and self.vanishing_order == other.vanishing_order)

    def __hash__(self):
        return hash((self.segments, self.vanishing_order))

    def __repr__(self):
        parts = [f"({s}, x{m})" for s, m in self.segments]
        if self.vanishing_order:
            parts.append(f"zero^{self.vanishing_order}")
        return "<polygon " + " ".join(parts) + ">"

    def to_json(self) -> list:
        out = [{"slope": str(s), "mult": m} for s, m in self.segments]
        if self.vanishing_order:
            out.append({"slope": "inf", "mult": self.vanishing_order})
        return out


def _lower_hull(points):
    # points: [(i, Fraction v)] ascending in i, distinct i
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # pop the middle point when it lies on or above the chord
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _hull_value(hull, x):
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= x <= x2:
            return y1 + Fraction(y2 - y1, x2 - x1) * (x - x1)
    raise KernelError(f"x = {x} outside hull support")


def newton_polygon(P: Polynomial) -> NewtonPolygon:
    """The lower hull of (degree, coefficient valuation), as root data.

    Args:
        P: polynomial whose coefficient valuations are determinate.

    Returns:
        NewtonPolygon with segments (root valuation, multiplicity)
        ascending, plus the order of vanishing at X = 0.

    Raises:
        IndeterminateError: some coefficient is zero at a precision low
            enough that its true valuation could alter the hull, or a
            leading run of coefficients vanishes only at partial
            precision.
    """
    full = Fraction(P.config.prec)
    vanish = 0
    while P.coeffs[vanish].is_zero():
        vanish += 1
    for i in range(vanish):
        if P.coeffs[i].precexp.as_fraction() < full:
            raise IndeterminateError(
                f"coefficient {i} is zero only at precision "
                f"{P.coeffs[i].precexp}; the vanishing order at X = 0 "
                f"is not determined")
    points = []
    zeros = []
    for i in range(vanish, len(P.coeffs)):
        c = P.coeffs[i]
        if c.is_zero():
            zeros.append((i, c.precexp.as_fraction()))
        else:
            points.append((i, c.valuation().as_fraction()))
    hull = _lower_hull(points)
    for i, bound in zeros:
        if bound < _hull_value(hull, i):
            raise IndeterminateError(
                f"coefficient {i} is zero at precision {bound}, below the "
                f"hull; its valuation can still change the polygon")
    segments = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segments.append((Fraction(y1 - y2, x2 - x1), x2 - x1))
    segments.reverse()
    return NewtonPolygon(segments, vanish)


# =====================================================================
# Hensel lifting
# =====================================================================

def hensel_root(P: Polynomial, x0):
    """Refine a simple approximate root by Newton iteration.

    Args:
        P: polynomial over either ring.
        x0: element with v(P(x0)) > 2 v(P'(x0)) at current precision.

    Returns:
        A root x agreeing with x0 modulo the uniformizer power
        v(P(x0)) - v(P'(x0)), refined until the residual vanishes at
        working precision.

    Raises:
        RootError: the precondition fails, or the iteration stops
            improving before the residual is zero at precision.
    """
    if type(x0) is not _KIND_CLASS[P.kind]:
        raise ConfigError(f"seed kind does not match the {P.kind} polynomial")
    residual = P(x0)
    if residual.is_zero():
        return x0
    v_res = residual.valuation().as_fraction()
    deriv = P.derivative_at(x0)
    if deriv.is_zero():
        raise RootError(
            "derivative vanishes at the seed; the root is not simple "
            "at current precision")
    v_der = deriv.valuation().as_fraction()
    if v_res <= 2 * v_der:
        raise RootError(
            f"Hensel precondition fails: v(P(x0)) = {v_res} is not "
            f"greater than 2 v(P'(x0)) = {2 * v_der}")
    x = x0
    for _ in range(P.config.prec + 2):
        step = divide_exact(residual, P.derivative_at(x))
        x = x - step
        residual = P(x)
        if residual.is_zero():
            return x
        new_v = residual.valuation().as_fraction()
        if new_v <= v_res:
            raise RootError(
                f"Newton iteration stalled at residual valuation {new_v}")
        v_res = new_v
    raise RootError(
        f"no convergence within {P.config.prec + 2} Newton steps "
        f"(residual valuation {v_res})")


# =====================================================================
# Characteristic-p digit search
# =====================================================================


def _segment_digit_candidates(P: Polynomial, exp: Fraction):
    # Digits c for which the terms on the deepest segment cancel:
    # roots over F_p of sum lead(a_j) c^j over the j attaining
    # min(v(a_j) + j*exp).
    p = P.config.p
    best = None
    contributions = {}
    for j, c in enumerate(P.coeffs):
        if c.is_zero():
            continue
        level = c.valuation().as_fraction() + j * exp
        if best is None or level < best:
            best = level
            contributions = {j: c.sorted_digits()[0][1]}
        elif level == best:
            contributions[j] = c.sorted_digits()[0][1]
    out = []
    for cand in range(1, p):
        total = sum(d * pow(cand, j, p) for j, d in contributions.items())
        if total % p == 0:
            out.append(cand)
    return out


def charp_root(P: Polynomial, budget: int = 4000):
    """Search for a root of a characteristic-p polynomial, digitwise.

    Walks the Newton polygon deepest slope first: each slope gives the
    exponent of the next digit and the segment's residue equation gives
    the digit candidates; the polynomial is re-centered and the search
    continues until the constant term vanishes at precision.  Branches
    whose exponent leaves the dencap lattice are abandoned, with
    backtracking across both digit candidates and segments, so a root
    of maximal valuation is preferred but shallower roots are still
    found when the deep branches die off-lattice.

    Args:
        P: polynomial over the tilt with a determinate leading
            coefficient; degree >= 1.
        budget: maximum number of re-centerings across all branches.

    Returns:
        A root at the coefficients' common precision, or None when the
        exhaustive lattice search finds no root (for example when the
        needed exponent has a denominator that is not a p-power).

    Raises:
        RootError: the budget is exhausted before the search space is.
        IndeterminateError: a stage polygon is not determined.
    """
    if P.kind != "tilt":
        raise ConfigError("charp_root expects a polynomial over the tilt")
    if P.degree < 1:
        raise KernelError("cannot search a constant polynomial for roots")
    config = P.config
    target = min(c.precexp.as_fraction() for c in P.coeffs)
    if P.coeffs[0].is_zero():
        return TiltElement.zero(config, P.coeffs[0].precexp.as_fraction())
    nodes = [budget]

    def search(Pc, floor_exp):
        c0 = Pc.coeffs[0]
        if c0.is_zero() or c0.valuation().as_fraction() >= target:
            return []
        # Deepest segment first; on failure fall back to the shallower
        # ones.  Slopes at or below the previous digit's exponent cannot
        # extend a digit expansion and are skipped.
        for exp in sorted(newton_polygon(Pc).slopes(), reverse=True):
            if exp <= floor_exp:
                continue
            try:
                config.exp(exp)
            except KernelError:
                continue    # exponent outside the lattice; dead branch
            for cand in _segment_digit_candidates(Pc, exp):
                if nodes[0] <= 0:
                    raise RootError(
                        f"digit search budget ({budget} re-centerings) "
                        f"exhausted; a root may exist beyond it")
                nodes[0] -= 1
                digit = TiltElement.monomial(config, cand, exp)
                rest = search(Pc.shifted(digit), exp)
                if rest is not None:
                    return [(exp, cand)] + rest
        return None

    found = search(P, Fraction(-1))
    if found is None:
        return None
    return TiltElement(config, {e: c for e, c in found}, target)


# =====================================================================
# Tilt-to-untilt polynomial transfer
# =====================================================================

def _iterated_root(x: TiltElement, n: int) -> TiltElement:
    for _ in range(n):
        x = x.pth_root()
    # digits are exact by convention, so the precision lost to the
    # root chain is restored by choosing the canonical representative
    return x.with_precision(x.config.prec)


def fw_transfer(P: Polynomial, n: int) -> Polynomial:
    """Move a tilt polynomial across the correspondence at stage n.

    Each coefficient a_i becomes the multiplicative lift of its n-fold
    p-th root, taken verbatim (no compensating power), giving the
    stage-n member of the tower whose splitting data stabilizes.

    Args:
        P: polynomial over the tilt.
        n: nonnegative root depth.

    Returns:
        The polynomial over the untilt side with coefficients
        sharp(a_i^(1/p^n)) at full working precision.

    Raises:
        DencapError: a coefficient's root chain leaves the lattice.
    """
    if P.kind != "tilt":
        raise ConfigError("fw_transfer expects a polynomial over the tilt")
    if not isinstance(n, int) or n < 0:
        raise KernelError(f"root depth must be a nonnegative integer, not "
                          f"{n!r}")
    full = P.config.prec
    out = []
    for c in P.coeffs:
        if c.is_zero():
            out.append(UntiltElement.zero(P.config, full))
        else:
            out.append(sharp(_iterated_root(c, n), full))
    return Polynomial(out)


def transfer_agreement(P: Polynomial, n: int, resolution: int = 2):
    """Agreement valuation between consecutive re-raised transfers.

    The verbatim stage coefficients sharp(a^(1/p^n)) form a root tower
    whose members drift apart, so stabilization is measured on the
    compensated sequence sharp(a^(1/p^n))^(p^n), which walks the
    partial-power approximations of sharp(a) and is Cauchy.  Stage n
    is computed at precision resolution + n so the deepening agreement
    stays visible through the precision tracking.

    Args:
        P: polynomial over the tilt.
        n: stage index; stages n and n + 1 are compared.
        resolution: base precision for the stage-0 comparison.

    Returns:
        Fraction: the valuation up to which all coefficient pairs
        agree (the difference's certified precision when it has no
        visible digits).
    """
    if P.kind != "tilt":
        raise ConfigError("transfer_agreement expects a tilt polynomial")
    config = P.config
    agreement = None
    for c in P.coeffs:
        pair = []
        for stage in (n, n + 1):
            prec = min(resolution + stage, config.prec)
            if c.is_zero():
                lifted = UntiltElement.zero(config, prec)
            else:
                lifted = sharp(_iterated_root(c, stage), prec)
            pair.append(untilt_power_pn(lifted, stage))
        diff = pair[1] - pair[0]
        v = diff.valuation()
        level = diff.precexp.as_fraction() if v is INF else v.as_fraction()
        if agreement is None or level < agreement:
            agreement = level
    if agreement is None:
        raise KernelError("transfer_agreement needs at least one coefficient")
    return agreement


# =====================================================================
# Mixed-characteristic root refinement
# =====================================================================

def mixed_root_refine(P: Polynomial, charp_oracle=None, *,
                      max_stages: int | None = None):
    """Assemble a root of an untilt polynomial from digit solves.

    Loop: reduce the working polynomial modulo the uniformizer, ask the
    characteristic-p oracle for a root y, translate by the lift of y,
    then recenter on the deepest Newton slope s: substitute
    X -> uniformizer^s X and divide out the common uniformizer power.
    The root accumulates as lift(y_0) + c_0 (lift(y_1) + c_1 (...)).

    Args:
        P: monic polynomial over the untilt ring, integral coeffs.
        charp_oracle: callable Polynomial -> root or None; defaults to
            charp_root.
        max_stages: outer iteration cap, default the working precision.

    Returns:
        An element x with v(P(x)) at or above working precision.

    Raises:
        RootError: a stage has no characteristic-p root, a rescale
            exponent leaves the lattice, or the loop runs out of
            stages or of usable precision.
    """
    if P.kind != "untilt":
        raise ConfigError("mixed_root_refine expects an untilt polynomial")
    if P.degree < 1:
        raise KernelError("cannot refine a root of a constant polynomial")
    lead = P.coeffs[-1]
    if lead != lead.__class__.one(P.config).with_precision(
            lead.precexp.as_fraction()):
        raise KernelError("mixed_root_refine expects a monic polynomial")
    for c in P.coeffs:
        v = c.valuation()
        if v is not INF and v.as_fraction() < 0:
            raise KernelError("coefficients must be integral")
    if charp_oracle is None:
        charp_oracle = charp_root
    config = P.config
    full = config.prec
    if max_stages is None:
        max_stages = full

    x_acc = UntiltElement.zero(config, full)
    scale_exp = Fraction(0)
    R = P
    for _ in range(max_stages):
        residual = P(x_acc)
        if residual.is_zero() or residual.valuation().as_fraction() >= full:
            return x_acc

        reduced = [reduce_mod_uniformizer(c) for c in R.coeffs]
        while len(reduced) > 1 and reduced[-1].is_zero():
            reduced.pop()
        if len(reduced) == 1:
            raise RootError(
                "stage reduction is a nonzero constant; no digit exists "
                f"(stage polynomial {R!r})")
        Q = Polynomial(reduced)
        y = charp_oracle(Q)
        if y is None:
            raise RootError(
                f"characteristic-p stage has no root in the lattice "
                f"(stage polynomial {Q!r})")

        if not y.is_zero():
            y_sharp = sharp(y.with_precision(full), full)
            x_acc = x_acc + y_sharp.shift(scale_exp)
            R = R.shifted(y_sharp)
            residual = P(x_acc)
            if (residual.is_zero()
                    or residual.valuation().as_fraction() >= full):
                return x_acc

        r0 = R.coeffs[0]
        if r0.is_zero():
            # all information below r0's precision is spent; the direct
            # residual check above is the only remaining authority
            raise RootError(
                f"stage residual is zero only at precision {r0.precexp}; "
                f"cannot isolate the next digit")
        try:
            polygon = newton_polygon(R)
        except IndeterminateError as exc:
            raise RootError(f"stage polygon indeterminate: {exc}") from exc
        if not polygon.segments:
            raise RootError(f"stage polynomial {R!r} has no finite slopes")
        s = polygon.segments[-1][0]
        if s <= 0:
            raise RootError(
                f"deepest stage slope {s} is not positive; no further "
                f"digits below the uniformizer")
        try:
            config.exp(s)
        except KernelError as exc:
            raise RootError(
                f"rescale exponent {s} leaves the dencap lattice") from exc
        mu = min(c.valuation().as_fraction() + j * s
                 for j, c in enumerate(R.coeffs) if not c.is_zero())
        R = Polynomial.trimmed(
            c.shift(j * s - mu) for j, c in enumerate(R.coeffs))
        scale_exp += s

    raise RootError(f"no convergence within {max_stages} refinement stages")
