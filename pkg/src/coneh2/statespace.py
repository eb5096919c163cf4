"""l-causal state-space realizations: G = D + lambda C(z) (I - lambda A(z))^{-1} B
where A(z), C(z) are degree-1 z-Laurent matrix polynomials and B, D are
constant.  This class realizes exactly the cone-causal systems and is closed
under addition, composition, inversion, and the positive-feedback controller
interconnection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (AlgebraicLoop, DimensionMismatch, NotCone,
                     NotRealizableAsLCausal, SingularD)
from .series import BiSeries, SupportBox, first_cone_violation, is_cone_causal

_COND_LIMIT = 1e12


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ZMatrix:
    """M(z) = minus * z^{-1} + zero + plus * z, three equal-shape real matrices."""

    minus: np.ndarray = field(repr=False)
    zero: np.ndarray = field(repr=False)
    plus: np.ndarray = field(repr=False)

    def __post_init__(self):
        m, z, p = (np.atleast_2d(np.asarray(x, dtype=float))
                   for x in (self.minus, self.zero, self.plus))
        if not (m.shape == z.shape == p.shape):
            raise DimensionMismatch(f"ZMatrix parts differ: {m.shape}, {z.shape}, {p.shape}")
        object.__setattr__(self, "minus", _freeze(m))
        object.__setattr__(self, "zero", _freeze(z))
        object.__setattr__(self, "plus", _freeze(p))

    @property
    def shape(self):
        return self.zero.shape

    @staticmethod
    def zeros(rows: int, cols: int) -> "ZMatrix":
        return ZMatrix(np.zeros((rows, cols)), np.zeros((rows, cols)), np.zeros((rows, cols)))

    @staticmethod
    def constant(mat) -> "ZMatrix":
        mat = np.atleast_2d(np.asarray(mat, dtype=float))
        return ZMatrix(np.zeros_like(mat), mat, np.zeros_like(mat))

    def parts(self):
        return ((-1, self.minus), (0, self.zero), (1, self.plus))

    def at(self, theta: float) -> np.ndarray:
        return (self.minus * np.exp(-1j * theta) + self.zero
                + self.plus * np.exp(1j * theta))

    def left_const(self, mat) -> "ZMatrix":
        mat = np.atleast_2d(mat)
        return ZMatrix(mat @ self.minus, mat @ self.zero, mat @ self.plus)

    def right_const(self, mat) -> "ZMatrix":
        mat = np.atleast_2d(mat)
        return ZMatrix(self.minus @ mat, self.zero @ mat, self.plus @ mat)

    def __add__(self, other: "ZMatrix") -> "ZMatrix":
        return ZMatrix(self.minus + other.minus, self.zero + other.zero, self.plus + other.plus)

    def __neg__(self) -> "ZMatrix":
        return ZMatrix(-self.minus, -self.zero, -self.plus)


def _zm_block(rows) -> ZMatrix:
    return ZMatrix(np.block([[zm.minus for zm in row] for row in rows]),
                   np.block([[zm.zero for zm in row] for row in rows]),
                   np.block([[zm.plus for zm in row] for row in rows]))


@dataclass(frozen=True)
class LRealization:
    """Quadruple (A(z), B, C(z), D); state dimension = temporal order."""

    a: ZMatrix
    b: np.ndarray = field(repr=False)
    c: ZMatrix
    d: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.b, dtype=float))
        d = np.atleast_2d(np.asarray(self.d, dtype=float))
        n = self.a.shape[0]
        if self.a.shape != (n, n):
            raise DimensionMismatch(f"A must be square, got {self.a.shape}")
        if b.shape[0] != n:
            raise DimensionMismatch(f"B rows {b.shape[0]} != state dim {n}")
        if self.c.shape[1] != n:
            raise DimensionMismatch(f"C cols {self.c.shape[1]} != state dim {n}")
        if d.shape != (self.c.shape[0], b.shape[1]):
            raise DimensionMismatch(f"D shape {d.shape} incompatible with C/B")
        object.__setattr__(self, "b", _freeze(b))
        object.__setattr__(self, "d", _freeze(d))

    @property
    def n_states(self) -> int:
        return self.a.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.b.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.c.shape[0]

    @staticmethod
    def static_gain(d) -> "LRealization":
        d = np.atleast_2d(np.asarray(d, dtype=float))
        return LRealization(ZMatrix.zeros(0, 0), np.zeros((0, d.shape[1])),
                            ZMatrix.zeros(d.shape[0], 0), d)


def _inv_checked(mat: np.ndarray, err, what: str) -> np.ndarray:
    mat = np.atleast_2d(mat)
    if mat.size == 0:
        return mat
    cond = np.linalg.cond(mat)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise err(f"{what} is singular or ill-conditioned (cond={cond:.3g})")
    return np.linalg.inv(mat)


def ss_inverse(g: LRealization) -> LRealization:
    """(A - B D^{-1} C, -B D^{-1}, D^{-1} C, D^{-1}); entries stay degree 1."""
    if g.d.shape[0] != g.d.shape[1]:
        raise SingularD(f"D must be square to invert, got {g.d.shape}")
    dinv = _inv_checked(g.d, SingularD, "direct feedthrough D")
    bdinv = g.b @ dinv
    a = g.a + g.c.left_const(-bdinv)
    return LRealization(a, -bdinv, g.c.left_const(dinv), dinv)


def ss_add(g1: LRealization, g2: LRealization) -> LRealization:
    if g1.n_inputs != g2.n_inputs or g1.n_outputs != g2.n_outputs:
        raise DimensionMismatch("addition needs matching I/O dimensions")
    n1, n2 = g1.n_states, g2.n_states
    a = _zm_block([[g1.a, ZMatrix.zeros(n1, n2)],
                   [ZMatrix.zeros(n2, n1), g2.a]])
    b = np.vstack([g1.b, g2.b])
    c = _zm_block([[g1.c, g2.c]])
    return LRealization(a, b, c, g1.d + g2.d)


def ss_mul(g1: LRealization, g2: LRealization) -> LRealization:
    """Series interconnection realizing G1 * G2 (g2 feeds g1)."""
    if g1.n_inputs != g2.n_outputs:
        raise DimensionMismatch(f"inner dimensions differ: {g1.n_inputs} vs {g2.n_outputs}")
    n1, n2 = g1.n_states, g2.n_states
    a = _zm_block([[g1.a, g2.c.left_const(g1.b)],
                   [ZMatrix.zeros(n2, n1), g2.a]])
    b = np.vstack([g1.b @ g2.d, g2.b])
    c = _zm_block([[g1.c, g2.c.left_const(g1.d)]])
    return LRealization(a, b, c, g1.d @ g2.d)


def feedback_realize_K(g3: LRealization, gyu: LRealization) -> LRealization:
    """Positive-feedback interconnection realizing K = -G3 (I - Gyu G3)^{-1}.

    With G3 = Q this is exactly the closed-form decentralized controller
    K = -Q (I - Gyu Q)^{-1}.  State dimension is n3 + n.
    """
    if g3.n_inputs != gyu.n_outputs or gyu.n_inputs != g3.n_outputs:
        raise DimensionMismatch("g3 and gyu must form a square loop")
    d3, d = g3.d, gyu.d
    iu = np.eye(d3.shape[0])
    iy = np.eye(d.shape[0])
    m_u = _inv_checked(iu - d3 @ d, AlgebraicLoop, "I - D3*D")   # u-side loop gain
    m_y = _inv_checked(iy - d @ d3, AlgebraicLoop, "I - D*D3")   # y-side loop gain
    a3, b3, c3 = g3.a, g3.b, g3.c
    a, b, c = gyu.a, gyu.b, gyu.c

    a_k = _zm_block([
        [a3 + c3.left_const(b3 @ d @ m_u), c.left_const(b3 @ m_y)],
        [c3.left_const(b @ m_u), a + c.left_const(b @ d3 @ m_y)],
    ])
    b_k = np.vstack([-b3 @ m_y, -b @ d3 @ m_y])
    c_k = _zm_block([[c3.left_const(m_u), c.left_const(m_u @ d3)]])
    d_k = -m_u @ d3
    return LRealization(a_k, b_k, c_k, d_k)


# -- construction from polynomials and rationals ------------------------------


def realize_cone_polynomial(p: BiSeries, tol: float = 0.0) -> LRealization:
    """Exact realization of a finite cone-causal polynomial (scalar signals).

    Slice coefficients with |j| <= 1 share a single delay chain whose C(z) row
    emits slice k at chain position k.  Each monomial c z^j lambda^k with
    |j| >= 2 gets its own k-state chain applying one z^{sign(j)} shift per
    stage until the |j| shifts are spent.  expand_realization reproduces p
    exactly.
    """
    if not is_cone_causal(p, tol):
        raise NotCone(f"not cone causal at {first_cone_violation(p, tol)}")
    slices = {}
    for i, t, v in p.terms():
        if t >= 1:
            slices.setdefault(t, {})[i] = v

    shared_len = max((t for t, s in slices.items() if any(abs(j) <= 1 for j in s)),
                     default=0)
    chains = [(j, t, v) for t, s in slices.items() for j, v in s.items() if abs(j) >= 2]
    n = shared_len + sum(t for _, t, _ in chains)

    am = np.zeros((n, n))
    a0 = np.zeros((n, n))
    ap = np.zeros((n, n))
    b = np.zeros((n, 1))
    cm = np.zeros((1, n))
    c0 = np.zeros((1, n))
    cp = np.zeros((1, n))

    if shared_len:
        b[0, 0] = 1.0
        for s in range(shared_len - 1):
            a0[s + 1, s] = 1.0
        for t, s in slices.items():
            if t > shared_len:
                continue
            for j, v in s.items():
                part = {-1: cm, 0: c0, 1: cp}.get(j)
                if part is not None:
                    part[0, t - 1] = v

    base = shared_len
    for j, t, v in chains:
        b[base, 0] = 1.0
        shift_part = ap if j > 0 else am
        n_shift = min(abs(j), t - 1)
        for s in range(t - 1):
            (shift_part if s < n_shift else a0)[base + s + 1, base + s] = 1.0
        residual = abs(j) - n_shift
        (({1: cp, -1: cm}[1 if j > 0 else -1]) if residual else c0)[0, base + t - 1] = v
        base += t

    return LRealization(ZMatrix(am, a0, ap), b, ZMatrix(cm, c0, cp),
                        np.array([[p.coeff(0, 0)]]))


def _z_poly_degree(col: dict) -> int:
    return max((abs(j) for j in col), default=0)


def realize_rational(r) -> LRealization:
    """Realize num * den^{-1} with l-causal blocks.

    A single-state fused form covers den of lambda-degree 1 with num of
    lambda-degree <= 1 (the common plant shape); otherwise the numerator and
    each denominator factor are realized as cone polynomials and composed as
    num * (factor1 * factor2 * ...)^{-1}.
    """
    num, den = r.num, r.den
    if den.temporal_degree() <= 0:
        return _realize_cone_or_raise(num)

    if den.temporal_degree() == 1 and num.temporal_degree() <= 1:
        n0 = num.coeff(0, 0)
        if all(i == 0 or t != 0 or v == 0.0 for i, t, v in num.terms()):
            a1 = {i: -v for i, t, v in den.terms() if t == 1}
            n1 = {i: v for i, t, v in num.terms() if t == 1}
            cvec = dict(n1)
            for i, v in a1.items():
                cvec[i] = cvec.get(i, 0.0) + n0 * v
            if _z_poly_degree(a1) <= 1 and _z_poly_degree(cvec) <= 1:
                az = ZMatrix(np.array([[a1.get(-1, 0.0)]]), np.array([[a1.get(0, 0.0)]]),
                             np.array([[a1.get(1, 0.0)]]))
                cz = ZMatrix(np.array([[cvec.get(-1, 0.0)]]), np.array([[cvec.get(0, 0.0)]]),
                             np.array([[cvec.get(1, 0.0)]]))
                return LRealization(az, np.array([[1.0]]), cz, np.array([[n0]]))

    factors = r.den_factors or (den,)
    den_real = None
    for f in factors:
        fr = _realize_cone_or_raise(f)
        den_real = fr if den_real is None else ss_mul(den_real, fr)
    return ss_mul(_realize_cone_or_raise(num), ss_inverse(den_real))


def _realize_cone_or_raise(p: BiSeries) -> LRealization:
    try:
        return realize_cone_polynomial(p)
    except NotCone as exc:
        raise NotRealizableAsLCausal(str(exc)) from exc


# -- expansion and probing -----------------------------------------------------


def _zp_apply(parts, acc: np.ndarray, lo: int, S: int):
    """Multiply z-poly matrix (list of (offset, const matrix)) into acc.

    acc has shape (width, n, m) with acc[w] the coefficient of z^{lo + w}.
    Returns (new_acc, new_lo) clipped to |power| <= S.
    """
    width = acc.shape[0]
    rows = parts[0][1].shape[0]
    new = np.zeros((width + 2, rows, acc.shape[2]))
    for off, mat in parts:
        if not mat.any():
            continue
        contrib = np.einsum("rc,wcm->wrm", mat, acc)
        new[off + 1:off + 1 + width] += contrib
    new_lo = lo - 1
    # clip spatial support to |power| <= S
    powers = np.arange(new_lo, new_lo + new.shape[0])
    keep = np.nonzero(np.abs(powers) <= S)[0]
    if keep.size == 0:
        return np.zeros((1, rows, acc.shape[2])), 0
    return new[keep[0]:keep[-1] + 1], int(powers[keep[0]])


def expand_realization(g: LRealization, S: int, T: int) -> BiSeries:
    """Series expansion: slice 0 = D, slice k = C(z) A(z)^{k-1} B for k >= 1.

    Degree-1 entries make slice k span at most |i| <= k, so the result is
    structurally cone causal.
    """
    if g.n_inputs != 1 or g.n_outputs != 1:
        raise DimensionMismatch("expansion to BiSeries needs scalar signals")
    box = SupportBox(-S, S, 0, T)
    grid = np.zeros((box.spatial_size, box.temporal_size))
    grid[S, 0] = g.d[0, 0]
    if g.n_states == 0:
        return BiSeries(box, grid)
    a_parts = [(off, m) for off, m in g.a.parts()]
    c_parts = [(off, m) for off, m in g.c.parts()]
    acc = g.b[None, :, :]  # width 1 at power 0
    lo = 0
    for k in range(1, T + 1):
        out, out_lo = _zp_apply(c_parts, acc, lo, S)
        for w in range(out.shape[0]):
            grid[out_lo + w + S, k] = out[w, 0, 0]
        if k < T:
            acc, lo = _zp_apply(a_parts, acc, lo, S)
    return BiSeries(box, grid)


def stability_probe(g: LRealization, grid_n: int = 256) -> float:
    """Max over the theta grid of the spectral radius of A(e^{j theta})."""
    if g.n_states == 0:
        return 0.0
    worst = 0.0
    for theta in 2.0 * np.pi * np.arange(grid_n) / grid_n:
        worst = max(worst, float(np.max(np.abs(np.linalg.eigvals(g.a.at(theta))))))
    return worst


def realization_to_dict(g: LRealization) -> dict:
    """JSON-friendly export with row-major matrices."""
    return {
        "n_states": g.n_states,
        "A_-1": g.a.minus.tolist(), "A_0": g.a.zero.tolist(), "A_+1": g.a.plus.tolist(),
        "B": g.b.tolist(),
        "C_-1": g.c.minus.tolist(), "C_0": g.c.zero.tolist(), "C_+1": g.c.plus.tolist(),
        "D": g.d.tolist(),
    }
