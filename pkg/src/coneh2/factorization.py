"""Inner-outer factorization for the supported class: a pure temporal-delay
inner factor lambda^d times an outer (causally invertible) rational part.

Anything whose deflated numerator still has a z-dependent leading slice, or
whose candidate outer part fails the unit-circle probe, is rejected loudly:
general bivariate inner-outer factorization is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rational as rat
from . import series
from .errors import UnsupportedInnerStructure
from .rational import RationalTransfer
from .series import BiSeries


@dataclass(frozen=True)
class InnerOuter:
    """T2 = lambda^delay * outer, with outer causally invertible and cone causal."""

    delay: int
    outer: RationalTransfer


def inner_outer(t2: RationalTransfer, grid_n: int = 512, margin: float = 1e-6,
                check_orders: tuple[int, int] = (8, 8)) -> InnerOuter:
    """Factor t2 into a temporal delay and an outer part.

    The delay d is the largest power of lambda dividing the numerator.  The
    deflated numerator must have a scalar nonzero lambda^0 slice and the
    resulting outer part must pass the cone and outer probes; otherwise the
    inner factor is not a pure temporal delay and we refuse.
    """
    num = t2.num
    scale = float(np.max(np.abs(num.coeffs))) or 1.0
    d = 0
    for t in range(num.box.temporal_min, num.box.temporal_max + 1):
        if np.any(np.abs(num.coeffs[:, t - num.box.temporal_min]) > 1e-14 * scale):
            d = t
            break
    else:
        raise UnsupportedInnerStructure("numerator is identically zero")
    deflated = series.shift_temporal(num, -d)

    lead = deflated.coeffs[:, 0]
    center = -deflated.box.spatial_min
    mask = np.ones(lead.size, dtype=bool)
    if 0 <= center < lead.size:
        mask[center] = False
    bad = np.nonzero(np.abs(lead[mask]) > 1e-14 * scale)[0]
    if bad.size or not (0 <= center < lead.size) or lead[center] == 0.0:
        raise UnsupportedInnerStructure(
            "deflated numerator's lambda^0 slice is z-dependent; the inner factor "
            "is not a pure temporal delay")

    outer = rat.rational(deflated, den_factors=t2.den_factors)
    if not rat.is_outer(outer, grid_n=grid_n, margin=margin):
        worst = min(rat.min_root_magnitude(outer.num, grid_n),
                    rat.min_root_magnitude(outer.den, grid_n))
        raise UnsupportedInnerStructure(
            f"candidate outer part has a lambda-root of magnitude {worst:.6g} "
            f"inside the margin circle 1 + {margin:g}")
    S, T = check_orders
    probe = rat.expand(outer, S, T)
    if not series.is_cone_causal(probe, 1e-12):
        viol = series.first_cone_violation(probe, 1e-12)
        raise UnsupportedInnerStructure(f"outer part is not cone causal at {viol}")
    return InnerOuter(d, outer)


def apply_inner_adjoint(t1: RationalTransfer, d: int, S: int,
                        T_neg: int | None = None, T_pos: int = 60) -> BiSeries:
    """Expansion of lambda^{-d} * t1, the inner factor's adjoint applied to t1.

    On the unit circle the adjoint of lambda^d is lambda^{-d}, so this is a
    plain temporal shift of the causal expansion.  Result covers temporal
    range [-min(d, T_neg), T_pos]; a causal t1 cannot produce anything deeper.
    """
    if d < 0:
        raise ValueError("delay must be nonnegative")
    keep_neg = d if T_neg is None else min(T_neg, d)
    full = series.shift_temporal(rat.expand(t1, S, T_pos + d), -d)
    box = series.SupportBox(full.box.spatial_min, full.box.spatial_max,
                            -keep_neg, T_pos)
    return series.truncate(full, box)
