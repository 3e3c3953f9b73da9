from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from perfectoid.arith import FieldConfig, TiltElement, UntiltElement

settings.register_profile(
    "kernel",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("kernel")


def element_class(kind: str):
    return UntiltElement if kind == "untilt" else TiltElement


def elements(config: FieldConfig, kind: str, max_terms: int = 6,
             vary_precision: bool = False, max_denpow: int | None = None):
    """Strategy for canonical elements on config's exponent lattice.

    max_denpow restricts drawn digits to a coarser sublattice, leaving
    headroom under dencap for subsequent root extraction.
    """
    cls = element_class(kind)
    if max_denpow is None:
        max_denpow = config.dencap
    scale = config.p ** max_denpow
    limit = config.prec * scale
    digit_maps = st.dictionaries(
        st.integers(min_value=0, max_value=limit - 1),
        st.integers(min_value=1, max_value=config.p - 1),
        max_size=max_terms,
    )
    if vary_precision:
        prec_idx = st.integers(min_value=0, max_value=limit)
    else:
        prec_idx = st.just(limit)

    def build(raw, kidx):
        digits = {Fraction(j, scale): c for j, c in raw.items()}
        return cls(config, digits, Fraction(kidx, scale))

    return st.builds(build, digit_maps, prec_idx)
