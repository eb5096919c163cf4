"""Rational spatio-temporal transfer functions N(z, lambda) / D(z, lambda).

Numerator and denominator are finite BiSeries, polynomial in lambda and
Laurent in z.  The denominator's lambda^0 slice must be a nonzero scalar;
normal form scales it to exactly 1.  Denominators additionally carry their
construction factors (rat_mul / rat_add keep the factored form), which lets
the state-space layer realize products of low-degree factors with few states.
Expansion to a BiSeries happens only at evaluation boundaries, so the
rational algebra itself accumulates no truncation error.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import series
from .errors import DegenerateAtTheta
from .series import BiSeries, SupportBox


def _lead_scalar(p: BiSeries) -> float:
    """The lambda^0 slice of p, required to be a z-independent nonzero scalar."""
    if p.box.temporal_min > 0 or p.box.temporal_max < 0:
        raise ValueError("denominator has no lambda^0 slice")
    lead = p.coeffs[:, -p.box.temporal_min]
    center = -p.box.spatial_min
    d0 = float(lead[center]) if 0 <= center < lead.size else 0.0
    others = np.delete(lead, center) if 0 <= center < lead.size else lead
    if np.any(others != 0.0):
        raise ValueError("denominator lambda^0 slice depends on z")
    if d0 == 0.0:
        raise ValueError("denominator lambda^0 coefficient is zero")
    return d0


@dataclass(frozen=True)
class RationalTransfer:
    """G(z, lambda) = num / den with causally invertible den.

    Use :func:`rational` (or the arithmetic helpers) to construct; that path
    enforces normal form.  den always equals the product of den_factors.
    """

    num: BiSeries
    den: BiSeries
    den_factors: tuple = field(default=(), repr=False)

    def lambda_degree(self) -> int:
        return self.num.temporal_degree()


def rational(num: BiSeries, den: BiSeries | None = None,
             den_factors: tuple | None = None) -> RationalTransfer:
    """Build a normal-form RationalTransfer.

    Each denominator factor is scaled so its lambda^0 coefficient is 1 and the
    accumulated scale is folded into the numerator.
    """
    if num.box.temporal_min < 0:
        raise ValueError("numerator must be polynomial in lambda (t >= 0)")
    if den is None and den_factors is None:
        den_factors = (BiSeries.delta(),)
    elif den_factors is None:
        den_factors = (den,)
    scale = 1.0
    normed = []
    for f in den_factors:
        if f.box.temporal_min < 0:
            raise ValueError("denominator must be polynomial in lambda (t >= 0)")
        d0 = _lead_scalar(f)
        normed.append(f.scaled(1.0 / d0))
        scale *= d0
    den_full = normed[0]
    for f in normed[1:]:
        den_full = series.mul(den_full, f)
    return RationalTransfer(num.scaled(1.0 / scale), den_full, tuple(normed))


def constant(value: float) -> RationalTransfer:
    return rational(BiSeries.delta().scaled(value))


def expand(r: RationalTransfer, S: int, T: int) -> BiSeries:
    """Causal series expansion num * den^{-1} on |i| <= S, 0 <= t <= T.

    The inverse is computed on a spatially widened window so that the crop to
    |i| <= S is exact wherever the inverse slices themselves are exact; for
    cone data with S >= T every retained coefficient is exact.
    """
    pad = max(-r.num.box.spatial_min, r.num.box.spatial_max, 0)
    inv = series.invert_causal(r.den, T, S + pad)
    out_box = SupportBox(-S, S, 0, T)
    return series.mul(r.num, inv, out_box)


def rat_mul(a: RationalTransfer, b: RationalTransfer) -> RationalTransfer:
    return rational(series.mul(a.num, b.num), den_factors=a.den_factors + b.den_factors)


def rat_add(a: RationalTransfer, b: RationalTransfer) -> RationalTransfer:
    num = series.add(series.mul(a.num, b.den), series.mul(b.num, a.den))
    return rational(num, den_factors=a.den_factors + b.den_factors)


def rat_sub(a: RationalTransfer, b: RationalTransfer) -> RationalTransfer:
    return rat_add(a, RationalTransfer(b.num.scaled(-1.0), b.den, b.den_factors))


def lambda_roots_on_circle(d: BiSeries, grid_n: int = 512):
    """Magnitudes of the lambda-roots of d(e^{j theta}, lambda) on a theta grid.

    Returns a list of (theta, magnitudes) pairs.  Where the leading
    lambda-coefficient vanishes some roots escape to infinity; those thetas
    are reported with a DegenerateAtTheta warning and the remaining finite
    roots are returned.
    """
    if d.box.temporal_min < 0:
        raise ValueError("expected a polynomial in lambda")
    deg = d.temporal_degree()
    cols = deg - d.box.temporal_min + 1
    ii = np.arange(d.box.spatial_min, d.box.spatial_max + 1)
    thetas = 2.0 * np.pi * np.arange(grid_n) / grid_n
    scale = float(np.max(np.abs(d.coeffs))) or 1.0
    out = []
    degenerate = []
    for theta in thetas:
        ei = np.exp(1j * theta * ii)
        poly = ei @ d.coeffs[:, :cols]  # ascending lambda powers, possibly offset
        if d.box.temporal_min > 0:
            poly = np.concatenate([np.zeros(d.box.temporal_min, dtype=complex), poly])
        full_deg = poly.size - 1
        while poly.size > 1 and abs(poly[-1]) <= 1e-12 * scale:
            poly = poly[:-1]
        if poly.size - 1 < full_deg:
            degenerate.append(theta)
        if poly.size <= 1:
            out.append((float(theta), np.zeros(0)))
            continue
        roots = np.roots(poly[::-1])
        out.append((float(theta), np.abs(roots)))
    if degenerate:
        warnings.warn(DegenerateAtTheta(
            f"leading lambda-coefficient vanishes at {len(degenerate)} grid points "
            f"(first theta={degenerate[0]:.6f}); roots at infinity dropped"))
    return out


def min_root_magnitude(d: BiSeries, grid_n: int = 512) -> float:
    """Smallest lambda-root magnitude over the theta grid (inf if no roots)."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateAtTheta)
        reports = lambda_roots_on_circle(d, grid_n)
    mags = [m.min() for _, m in reports if m.size]
    return float(min(mags)) if mags else float("inf")


def is_outer(r: RationalTransfer, grid_n: int = 512, margin: float = 1e-6) -> bool:
    """True iff num and den have all lambda-roots outside the closed unit disc.

    Numerical probe on a theta grid; the margin guards against grid effects.
    The num's lambda^0 slice must be a nonzero scalar (causal invertibility
    at lambda = 0), checked first.
    """
    try:
        _lead_scalar(r.num)
    except ValueError:
        return False
    for p in (r.num, r.den):
        if min_root_magnitude(p, grid_n) <= 1.0 + margin:
            return False
    return True


def stable_on_grid(d: BiSeries, grid_n: int = 512, margin: float = 1e-9) -> bool:
    """Causal-stability probe: all lambda-roots of d strictly outside the disc."""
    return min_root_magnitude(d, grid_n) > 1.0 + margin
