"""The multiplicative lift, Teichmüller digits, Witt vectors and untilting.

The central map here sends an integral element x of the characteristic-p
field to

    x -> lim_n (x^(1/p^n) lifted digitwise)^(p^n)

in the characteristic-0 field; the limit is well defined modulo p^(n+1)
as soon as the n-th root is known modulo t.  ``sharp`` computes exactly
that finite-stage value.  On top of it sit the Teichmüller lift of a
residue digit (``sharp_const``), finite-length Witt vectors over the
tilt with their universal addition/multiplication polynomials, and the
untilting homomorphism ``theta``.

Powering x_n to the p^n-th power dominates the cost, so it runs on a
dense "layer" representation of the finite field layer generated by
p^(1/p^M): an array of p^M integer coefficients modulo p^N indexed by
the fractional part of the exponent, with index overflow folded back by
u^(p^M) = p.  Convolutions use numpy int64 when the coefficient bound
allows and exact big-int arithmetic otherwise.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .arith import (
    ConfigError,
    FieldConfig,
    KernelError,
    PrecisionError,
    TiltElement,
    UntiltElement,
)

# =====================================================================
# Layer-ring powering
# =====================================================================

# np.convolve accumulates up to p^M products of coefficients < p^prec;
# stay well inside int64.
_INT64_GUARD = 2 ** 62


def _layer_from_element(x: UntiltElement) -> tuple[list[int], int]:
    """Dense coefficients C_r of x = sum_r C_r * p^(r/p^M), C_r < p^N."""
    m = max((e.denpow for e in x.digits), default=0)
    p = x.config.p
    scale = p ** m
    coeffs = [0] * scale
    for e, c in x.digits.items():
        f = e.as_fraction()
        q = int(f)
        r = (f - q) * scale
        coeffs[int(r)] += c * p ** q
    return coeffs, m


def _layer_to_element(coeffs, m: int, config: FieldConfig,
                      precexp) -> UntiltElement:
    p = config.p
    scale = p ** m
    digits: dict[Fraction, int] = {}
    for r, value in enumerate(coeffs):
        value = int(value)
        q = 0
        while value:
            value, d = divmod(value, p)
            if d:
                digits[q + Fraction(r, scale)] = d
            q += 1
    return UntiltElement(config, digits, precexp)


def _layer_mul_numpy(a, b, p: int, length: int, mod: int):
    conv = np.convolve(a, b)
    if len(conv) > length:
        # u^(p^M) = p: fold the overflowing indices back down.
        head = conv[:length].copy()
        tail = conv[length:]
        head[:len(tail)] += p * tail
        conv = head
    return conv % mod


def _layer_mul_python(a, b, p: int, length: int, mod: int):
    out = [0] * length
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if bj == 0:
                continue
            k = i + j
            term = ai * bj
            if k >= length:
                k -= length
                term *= p
            out[k] = (out[k] + term) % mod
    return out


def untilt_power_pn(x: UntiltElement, n: int,
                    use_numpy: bool | None = None) -> UntiltElement:
    """x^(p^n) modulo p^N, computed on the dense layer representation."""
    if n < 0:
        raise KernelError(f"negative power tower height {n}")
    config = x.config
    p, prec = config.p, config.prec
    if n == 0:
        return x
    if x.is_zero():
        kf = min(x.precexp.as_fraction() * p ** n, Fraction(prec))
        return UntiltElement.zero(config, kf)
    coeffs, m = _layer_from_element(x)
    length = len(coeffs)
    mod = p ** prec
    if use_numpy is None:
        use_numpy = length * (mod - 1) ** 2 * (p + 1) < _INT64_GUARD
    if use_numpy:
        vec = np.array(coeffs, dtype=np.int64)
        mul = lambda u, v: _layer_mul_numpy(u, v, p, length, mod)
    else:
        vec = coeffs
        mul = lambda u, v: _layer_mul_python(u, v, p, length, mod)
    for _ in range(n):
        # square-and-multiply for the exponent p
        acc = None
        base = vec
        e = p
        while e:
            if e & 1:
                acc = base if acc is None else mul(acc, base)
            e >>= 1
            if e:
                base = mul(base, base)
        vec = acc
    if use_numpy:
        vec = vec.tolist()
    return _layer_to_element(vec, m, config, x.precexp)


# =====================================================================
# The multiplicative lift
# =====================================================================

def sharp(x: TiltElement, target_prec: int) -> UntiltElement:
    """The multiplicative lift of x, modulo p^target_prec.

    With n = target_prec - 1, takes the exact n-fold p-th root of x,
    lifts its residue digitwise, and raises the lift to the p^n-th
    power; the result is independent of the choice of lift.

    The lift-independence argument needs the rooted input still known
    modulo t, i.e. x known modulo t^(p^n).  Below that the function is
    still deterministic (it powers the canonical representative), but
    only the digits under the weaker bound obtained by iterating
    a -> min(p*a, a+1) from a = precexp/p^n are representative-free.
    Exact inputs such as monomials are unaffected.

    Args:
        x: tilt element, known at least modulo t^target_prec.
        target_prec: positive integer <= the working precision N.

    Returns:
        x-sharp as an untilt element with precision exponent target_prec.

    Raises:
        PrecisionError: target out of range or input too coarse.
        DencapError: the root chain leaves the exponent lattice.
    """
    if not isinstance(x, TiltElement):
        raise ConfigError(
            f"sharp expects a tilt element, got "
            f"{getattr(x, 'kind', type(x).__name__)}")
    config = x.config
    if not isinstance(target_prec, int) or target_prec < 1:
        raise PrecisionError(f"target precision must be a positive integer, "
                             f"got {target_prec!r}")
    if target_prec > config.prec:
        raise PrecisionError(
            f"target precision {target_prec} exceeds working precision "
            f"{config.prec}")
    if x.precexp.as_fraction() < target_prec:
        raise PrecisionError(
            f"sharp to precision {target_prec} needs input known modulo "
            f"t^{target_prec}, have t^{x.precexp}")
    n = target_prec - 1
    pn = config.p ** n
    # Root the exponents directly: digits live in the prime field, where
    # the p-th root is the identity, so the n-fold root of x has digits
    # {e/p^n: c}.  Chaining pth_root here would floor the precision
    # exponent to the lattice at every stage and could round it to 0,
    # discarding the exponent-0 digits the lift needs; all the lift uses
    # of the root is its residue modulo t, which the validated input
    # precision pins down.
    acc = {}
    for e, c in x.digits.items():
        ef = e.as_fraction() / pn
        config.exp(ef)
        if ef < 1:
            acc[ef] = c
    if not acc:
        return UntiltElement.zero(config, target_prec)
    # Build the lift at a full-precision representative; any choice
    # changes the p^n-th power only beyond p^(n+1).
    base = UntiltElement(config, acc, Fraction(config.prec))
    power = untilt_power_pn(base, n)
    return power.with_precision(target_prec)


def sharp_const(config: FieldConfig, c: int) -> UntiltElement:
    """The Teichmüller lift of the residue digit c.

    The unique (p-1)-st root of unity (or 0) congruent to c mod p,
    truncated to the working precision; found by iterating c -> c^p
    modulo p^N to its fixed point.
    """
    p, prec = config.p, config.prec
    if not 0 <= c < p:
        raise KernelError(f"residue digit must lie in 0..{p - 1}, got {c}")
    if c == 0:
        return UntiltElement.zero(config)
    mod = p ** prec
    value = c % mod
    for _ in range(prec + 2):
        nxt = pow(value, p, mod)
        if nxt == value:
            break
        value = nxt
    else:
        raise KernelError("Teichmüller iteration did not stabilize")
    return UntiltElement.from_int(config, value)


# =====================================================================
# Witt vectors
# =====================================================================

@lru_cache(maxsize=None)
def _witt_structure_integer(p: int, op: str, length: int):
    """Universal Witt component polynomials S_0..S_{length-1} over Z.

    Solved from the ghost-component identities w_k(S) = w_k(X) op w_k(Y)
    and stored as {exponent tuple: integer coeff} over the generators
    x0..x_{n-1}, y0..y_{n-1}.
    """
    xs = sympy.symbols(f"x0:{length}")
    ys = sympy.symbols(f"y0:{length}")
    gens = list(xs) + list(ys)

    def ghost(vals, k):
        return sum(p ** j * vals[j] ** (p ** (k - j)) for j in range(k + 1))

    exprs = []
    tables = []
    for k in range(length):
        if op == "add":
            target = ghost(xs, k) + ghost(ys, k)
        elif op == "mul":
            target = ghost(xs, k) * ghost(ys, k)
        else:
            raise KernelError(f"unknown Witt operation {op!r}")
        acc = target - sum(
            p ** j * exprs[j] ** (p ** (k - j)) for j in range(k))
        poly = sympy.Poly(sympy.expand(acc), *gens)
        scale = p ** k
        terms = []
        for monom, coeff in poly.terms():
            q, r = divmod(int(coeff), scale)
            if r:
                raise KernelError(
                    "Witt recursion produced a nonintegral component")
            if q:
                terms.append((monom, q))
        exprs.append(sympy.Add(*(
            c * sympy.prod(g ** e for g, e in zip(gens, monom))
            for monom, c in terms)))
        tables.append(tuple(terms))
    return tuple(tables)


@lru_cache(maxsize=None)
def _witt_structure(p: int, op: str, length: int):
    """The integer component polynomials reduced into characteristic p."""
    out = []
    for terms in _witt_structure_integer(p, op, length):
        table = {}
        for monom, coeff in terms:
            c = coeff % p
            if c:
                table[monom] = c
        out.append(table)
    return tuple(out)


def _tilt_power(x: TiltElement, e: int) -> TiltElement:
    """x^e using free Frobenius twists for the p-power part of e."""
    p = x.config.p
    out = TiltElement.one(x.config)
    twisted = x
    while e:
        e, d = divmod(e, p)
        if d:
            out = out * twisted ** d
        if e:
            twisted = twisted.frobenius()
    return out


class WittVector:
    """A finite-length Witt vector (x_0, ..., x_{n-1}) over the tilt."""

    __slots__ = ("config", "components")

    def __init__(self, config: FieldConfig, components):
        components = tuple(components)
        if not components:
            raise KernelError("Witt vectors have length >= 1")
        if len(components) > config.prec:
            raise KernelError(
                f"length {len(components)} exceeds working precision "
                f"{config.prec}")
        for c in components:
            if not isinstance(c, TiltElement):
                raise ConfigError("Witt components must be tilt elements")
            if c.config != config:
                raise ConfigError("Witt components must share the config")
        object.__setattr__(self, "config", config)
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):
        raise AttributeError("WittVector is immutable")

    @property
    def length(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, config: FieldConfig, length: int) -> "WittVector":
        return cls(config, [TiltElement.zero(config)] * length)

    @classmethod
    def teichmuller(cls, x: TiltElement, length: int) -> "WittVector":
        rest = [TiltElement.zero(x.config)] * (length - 1)
        return cls(x.config, [x, *rest])

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return (self.config == other.config
                and self.components == other.components)

    def __hash__(self):
        return hash((self.config, self.components))

    def __add__(self, other):
        return witt_add(self, other)

    def __mul__(self, other):
        return witt_mul(self, other)

    def __repr__(self):
        inner = ", ".join(c.to_text() for c in self.components)
        return f"W({inner})"

    def to_json(self) -> dict:
        return {"length": self.length,
                "components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, data: dict) -> "WittVector":
        from .arith import element_from_json
        try:
            components = [element_from_json(c) for c in data["components"]]
            if data["length"] != len(components):
                raise KernelError("Witt length field does not match")
        except (KeyError, TypeError) as exc:
            raise KernelError(f"malformed Witt JSON: {exc}") from exc
        if not components:
            raise KernelError("Witt vectors have length >= 1")
        return cls(components[0].config, components)


_WITT_MAX_LENGTH = 4


def _witt_op(a: WittVector, b: WittVector, op: str) -> WittVector:
    if a.config != b.config or a.length != b.length:
        raise ConfigError("Witt operands must share config and length")
    n = a.length
    if n > _WITT_MAX_LENGTH:
        raise KernelError(
            f"Witt arithmetic is provided for length <= {_WITT_MAX_LENGTH}, "
            f"got {n}")
    config = a.config
    tables = _witt_structure(config.p, op, n)
    values = list(a.components) + list(b.components)
    out = []
    for table in tables:
        comp = TiltElement.zero(config)
        for monom, coeff in table.items():
            term = TiltElement.from_int(config, coeff)
            for idx, e in enumerate(monom):
                if e:
                    term = term * _tilt_power(values[idx], e)
            comp = comp + term
        out.append(comp)
    return WittVector(config, out)


def witt_add(a: WittVector, b: WittVector) -> WittVector:
    return _witt_op(a, b, "add")


def witt_mul(a: WittVector, b: WittVector) -> WittVector:
    return _witt_op(a, b, "mul")


# =====================================================================
# Untilting
# =====================================================================

def theta(a: WittVector) -> UntiltElement:
    """The untilting homomorphism, modulo p^length.

    theta(x_0, ..., x_{n-1}) = sum_i sharp(x_i^(1/p^i)) * p^i mod p^n,
    the normalization with theta(Teichmüller(x)) = sharp(x).  Components
    are taken as exact digit expansions, so the i-th root may be promoted
    back to full working precision before lifting.
    """
    config = a.config
    n = a.length
    total = UntiltElement.zero(config, n)
    for i, x in enumerate(a.components):
        root = x
        for _ in range(i):
            root = root.pth_root()
        root = root.with_precision(config.prec)
        term = sharp(root, n)
        if i:
            term = term.shift(i).with_precision(n)
        total = total + term
    return total
