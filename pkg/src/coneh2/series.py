"""Truncated bivariate series in a two-sided spatial variable z and a temporal
variable lambda.

A :class:`BiSeries` stores a dense coefficient grid c[i, t] over a finite
:class:`SupportBox`; everything outside the box is zero.  Temporal indices may
be negative (L2 objects); cone causality means c[i, t] = 0 for t < |i|.
All values are immutable after construction and every operation is a pure
function, so independent computations can safely run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfBox, NonScalarLeadingTerm, SingularLeadingTerm


@dataclass(frozen=True)
class SupportBox:
    """Inclusive index ranges [spatial_min, spatial_max] x [temporal_min, temporal_max]."""

    spatial_min: int
    spatial_max: int
    temporal_min: int
    temporal_max: int

    def __post_init__(self):
        if self.spatial_min > self.spatial_max:
            raise ValueError(f"spatial_min {self.spatial_min} > spatial_max {self.spatial_max}")
        if self.temporal_min > self.temporal_max:
            raise ValueError(f"temporal_min {self.temporal_min} > temporal_max {self.temporal_max}")

    @property
    def spatial_size(self) -> int:
        return self.spatial_max - self.spatial_min + 1

    @property
    def temporal_size(self) -> int:
        return self.temporal_max - self.temporal_min + 1

    def contains(self, i: int, t: int) -> bool:
        return (self.spatial_min <= i <= self.spatial_max
                and self.temporal_min <= t <= self.temporal_max)

    def hull(self, other: "SupportBox") -> "SupportBox":
        return SupportBox(min(self.spatial_min, other.spatial_min),
                          max(self.spatial_max, other.spatial_max),
                          min(self.temporal_min, other.temporal_min),
                          max(self.temporal_max, other.temporal_max))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class BiSeries:
    """Coefficient grid of sum_{(i,t) in box} coeffs[i, t] z^i lambda^t."""

    box: SupportBox
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.box.spatial_size, self.box.temporal_size):
            raise ValueError(f"coeff grid {c.shape} does not match box "
                             f"{(self.box.spatial_size, self.box.temporal_size)}")
        object.__setattr__(self, "coeffs", _frozen(c))

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zeros(box: SupportBox) -> "BiSeries":
        return BiSeries(box, np.zeros((box.spatial_size, box.temporal_size)))

    @staticmethod
    def delta() -> "BiSeries":
        """The identity series: 1 at (i, t) = (0, 0)."""
        return BiSeries.from_terms([(0, 0, 1.0)])

    @staticmethod
    def from_terms(terms) -> "BiSeries":
        """Build from an iterable of (i, t, value) triples."""
        terms = list(terms)
        if not terms:
            return BiSeries.zeros(SupportBox(0, 0, 0, 0))
        i_lo = min(i for i, _, _ in terms)
        i_hi = max(i for i, _, _ in terms)
        t_lo = min(t for _, t, _ in terms)
        t_hi = max(t for _, t, _ in terms)
        box = SupportBox(i_lo, i_hi, t_lo, t_hi)
        grid = np.zeros((box.spatial_size, box.temporal_size))
        for i, t, v in terms:
            grid[i - i_lo, t - t_lo] += v
        return BiSeries(box, grid)

    @staticmethod
    def z_polynomial(coeffs_by_power: dict, t: int = 0) -> "BiSeries":
        """A z-Laurent polynomial placed at a single temporal index."""
        return BiSeries.from_terms([(i, t, v) for i, v in coeffs_by_power.items()])

    # -- element access ------------------------------------------------------

    def coeff(self, i: int, t: int) -> float:
        if not self.box.contains(i, t):
            return 0.0
        return float(self.coeffs[i - self.box.spatial_min, t - self.box.temporal_min])

    def terms(self):
        """Yield nonzero (i, t, value) triples in (i, t) order."""
        for ii in range(self.box.spatial_size):
            for tt in range(self.box.temporal_size):
                v = self.coeffs[ii, tt]
                if v != 0.0:
                    yield (ii + self.box.spatial_min, tt + self.box.temporal_min, float(v))

    def temporal_degree(self) -> int:
        """Largest t with a nonzero coefficient (box max if all zero)."""
        nz = np.nonzero(np.any(self.coeffs != 0.0, axis=0))[0]
        if nz.size == 0:
            return self.box.temporal_min
        return int(nz[-1]) + self.box.temporal_min

    def scaled(self, s: float) -> "BiSeries":
        return BiSeries(self.box, self.coeffs * s)

    # light operator sugar; the module-level functions are the contract
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, other.scaled(-1.0))

    def __neg__(self):
        return self.scaled(-1.0)


def truncate(a: BiSeries, box: SupportBox) -> BiSeries:
    """Crop/zero-pad a onto box; coefficients outside box are discarded."""
    grid = np.zeros((box.spatial_size, box.temporal_size))
    i_lo = max(a.box.spatial_min, box.spatial_min)
    i_hi = min(a.box.spatial_max, box.spatial_max)
    t_lo = max(a.box.temporal_min, box.temporal_min)
    t_hi = min(a.box.temporal_max, box.temporal_max)
    if i_lo <= i_hi and t_lo <= t_hi:
        grid[i_lo - box.spatial_min:i_hi - box.spatial_min + 1,
             t_lo - box.temporal_min:t_hi - box.temporal_min + 1] = \
            a.coeffs[i_lo - a.box.spatial_min:i_hi - a.box.spatial_min + 1,
                     t_lo - a.box.temporal_min:t_hi - a.box.temporal_min + 1]
    return BiSeries(box, grid)


def lambda_order_truncate(a: BiSeries, order: int) -> BiSeries:
    """Triangular truncation: keep slice t only for t <= order, full z width.

    This is the alternative truncation shape for cone objects (finite number
    of temporal terms, each with its naturally growing spatial support).
    """
    box = SupportBox(a.box.spatial_min, a.box.spatial_max,
                     a.box.temporal_min, min(a.box.temporal_max, order))
    return truncate(a, box)


def add(a: BiSeries, b: BiSeries) -> BiSeries:
    """Coefficient-wise sum on the union hull of the two boxes."""
    box = a.box.hull(b.box)
    grid = np.zeros((box.spatial_size, box.temporal_size))
    for s in (a, b):
        grid[s.box.spatial_min - box.spatial_min:s.box.spatial_max - box.spatial_min + 1,
             s.box.temporal_min - box.temporal_min:s.box.temporal_max - box.temporal_min + 1] += s.coeffs
    return BiSeries(box, grid)


def mul(a: BiSeries, b: BiSeries, out_box: SupportBox | None = None) -> BiSeries:
    """Exact 2-D convolution, optionally restricted to out_box.

    The full product box is exact; with an out_box the result equals the
    (cropped) exact product, so truncation never corrupts retained entries.
    Cone x cone stays cone.
    """
    full = SupportBox(a.box.spatial_min + b.box.spatial_min,
                      a.box.spatial_max + b.box.spatial_max,
                      a.box.temporal_min + b.box.temporal_min,
                      a.box.temporal_max + b.box.temporal_max)
    grid = np.zeros((full.spatial_size, full.temporal_size))
    for ta in range(a.box.temporal_size):
        col_a = a.coeffs[:, ta]
        if not col_a.any():
            continue
        for tb in range(b.box.temporal_size):
            col_b = b.coeffs[:, tb]
            if not col_b.any():
                continue
            grid[:, ta + tb] += np.convolve(col_a, col_b)
    out = BiSeries(full, grid)
    return out if out_box is None else truncate(out, out_box)


def _add_window(acc: np.ndarray, vals: np.ndarray, lo: int, S: int) -> None:
    """acc spans spatial [-S, S]; add vals whose first entry sits at index lo."""
    src_lo = max(0, -S - lo)
    src_hi = min(vals.size, S - lo + 1)
    if src_lo < src_hi:
        acc[src_lo + lo + S:src_hi + lo + S] += vals[src_lo:src_hi]


def invert_causal(a: BiSeries, T: int, S: int, tol: float = 1e-12) -> BiSeries:
    """Causal inverse of a temporally causal series, truncated to 0..T, |i| <= S.

    Requires the lambda^0 slice to be a nonzero scalar d0 (automatic for cone
    series).  Slice k of the inverse is built by the convolution recursion
    c_k = -d0^{-1} sum_{j>=1} d_j * c_{k-j}; each c_k is a z-Laurent polynomial.
    Cone input gives cone output: slice k exactly fits in |i| <= k, so for
    S >= T no truncation occurs at all.
    """
    if a.box.temporal_min < 0:
        if np.any(a.coeffs[:, :-a.box.temporal_min] != 0.0):
            raise ValueError("input has anticausal support; not temporally causal")
    if a.box.temporal_min > 0 or a.box.temporal_max < 0:
        raise SingularLeadingTerm("lambda^0 slice is absent")
    lead = a.coeffs[:, -a.box.temporal_min] if a.box.temporal_min < 0 else a.coeffs[:, 0]
    center = -a.box.spatial_min
    d0 = float(lead[center]) if 0 <= center < lead.size else 0.0
    mask = np.ones(lead.size, dtype=bool)
    if 0 <= center < lead.size:
        mask[center] = False
    if np.any(lead[mask] != 0.0):
        raise NonScalarLeadingTerm("lambda^0 slice depends on z")
    if abs(d0) < tol:
        raise SingularLeadingTerm(f"lambda^0 coefficient {d0} below tolerance {tol}")

    width = 2 * S + 1
    inv = np.zeros((width, T + 1))
    inv[S, 0] = 1.0 / d0
    a_cols = [(j, a.coeffs[:, j - a.box.temporal_min])
              for j in range(max(1, a.box.temporal_min), a.box.temporal_max + 1)
              if a.coeffs[:, j - a.box.temporal_min].any()]
    for k in range(1, T + 1):
        acc = np.zeros(width)
        for j, col in a_cols:
            if j > k:
                continue
            conv = np.convolve(col, inv[:, k - j])
            _add_window(acc, conv, a.box.spatial_min - S, S)
        inv[:, k] = -acc / d0
    return BiSeries(SupportBox(-S, S, 0, T), inv)


def coeffs_equal(a: BiSeries, b: BiSeries, tol: float = 0.0) -> bool:
    """Coefficient-wise comparison as series (boxes need not match)."""
    return max_coeff_diff(a, b) <= tol


def max_coeff_diff(a: BiSeries, b: BiSeries) -> float:
    box = a.box.hull(b.box)
    return float(np.max(np.abs(truncate(a, box).coeffs - truncate(b, box).coeffs)))


def h2_norm_sq(a: BiSeries) -> float:
    """Sum of squared coefficients (Parseval energy)."""
    return float(np.sum(a.coeffs * a.coeffs))


def causal_part(a: BiSeries) -> BiSeries:
    """Orthogonal projection onto t >= 0."""
    t_lo = max(a.box.temporal_min, 0)
    if a.box.temporal_max < 0:
        return BiSeries.zeros(SupportBox(a.box.spatial_min, a.box.spatial_max, 0, 0))
    box = SupportBox(a.box.spatial_min, a.box.spatial_max, t_lo, a.box.temporal_max)
    return truncate(a, box)


def anticausal_part(a: BiSeries) -> BiSeries:
    """Complementary projection onto t < 0; causal + anticausal = a exactly."""
    if a.box.temporal_min >= 0:
        return BiSeries.zeros(SupportBox(a.box.spatial_min, a.box.spatial_max, -1, -1))
    box = SupportBox(a.box.spatial_min, a.box.spatial_max,
                     a.box.temporal_min, min(a.box.temporal_max, -1))
    return truncate(a, box)


def shift_temporal(a: BiSeries, d: int) -> BiSeries:
    """Multiply by lambda^d (d may be negative): shift all temporal indices by d."""
    box = SupportBox(a.box.spatial_min, a.box.spatial_max,
                     a.box.temporal_min + d, a.box.temporal_max + d)
    return BiSeries(box, a.coeffs)


def is_cone_causal(a: BiSeries, tol: float = 0.0) -> bool:
    """True iff |c(i, t)| <= tol whenever t < |i|."""
    ii = np.arange(a.box.spatial_min, a.box.spatial_max + 1)[:, None]
    tt = np.arange(a.box.temporal_min, a.box.temporal_max + 1)[None, :]
    below = tt < np.abs(ii)
    return bool(np.all(np.abs(a.coeffs[below]) <= tol))


def first_cone_violation(a: BiSeries, tol: float = 0.0):
    """The first (i, t, value) below the cone exceeding tol, or None."""
    for i, t, v in a.terms():
        if t < abs(i) and abs(v) > tol:
            return (i, t, v)
    return None


@dataclass(frozen=True)
class LambdaSeries:
    """One-variable series sum_t coeffs[t - temporal_min] lambda^t."""

    temporal_min: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if c.size == 0:
            c = np.zeros(1)
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def temporal_max(self) -> int:
        return self.temporal_min + self.coeffs.size - 1

    def coeff(self, t: int) -> float:
        if self.temporal_min <= t <= self.temporal_max:
            return float(self.coeffs[t - self.temporal_min])
        return 0.0

    def shifted(self, d: int) -> "LambdaSeries":
        return LambdaSeries(self.temporal_min + d, self.coeffs)

    def causal_part(self) -> "LambdaSeries":
        if self.temporal_min >= 0:
            return self
        if self.temporal_max < 0:
            return LambdaSeries(0, np.zeros(1))
        return LambdaSeries(0, self.coeffs[-self.temporal_min:])

    def anticausal_part(self) -> "LambdaSeries":
        if self.temporal_min >= 0:
            return LambdaSeries(-1, np.zeros(1))
        cut = min(self.temporal_max, -1) - self.temporal_min + 1
        return LambdaSeries(self.temporal_min, self.coeffs[:cut])

    def truncated(self, order: int) -> "LambdaSeries":
        """Keep temporal indices <= order."""
        if self.temporal_max <= order:
            return self
        keep = order - self.temporal_min + 1
        if keep <= 0:
            return LambdaSeries(max(self.temporal_min, 0), np.zeros(1))
        return LambdaSeries(self.temporal_min, self.coeffs[:keep])

    def norm_sq(self) -> float:
        return float(np.sum(self.coeffs * self.coeffs))


def spatial_slice(a: BiSeries, i: int) -> LambdaSeries:
    """The lambda-series of coefficients at fixed spatial index i."""
    if not (a.box.spatial_min <= i <= a.box.spatial_max):
        raise IndexOutOfBox(f"spatial index {i} outside [{a.box.spatial_min}, {a.box.spatial_max}]")
    return LambdaSeries(a.box.temporal_min, a.coeffs[i - a.box.spatial_min, :])


def torus_eval(a: BiSeries, theta: float, w: float) -> complex:
    """Evaluate at z = e^{j theta}, lambda = e^{j w}."""
    ii = np.arange(a.box.spatial_min, a.box.spatial_max + 1)
    tt = np.arange(a.box.temporal_min, a.box.temporal_max + 1)
    ei = np.exp(1j * theta * ii)
    et = np.exp(1j * w * tt)
    return complex(ei @ a.coeffs @ et)
