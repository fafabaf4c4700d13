"""Discrete Gaussian samplers: integers, ring vectors, gadget cosets, and
structured perturbations.

Width convention: a width ``s`` weights integers by ``exp(-pi x^2 / s^2)``,
giving standard deviation ``s / sqrt(2 pi)``.  Every sampler truncates at
``tail_cut * s`` around its center.

Three engines cooperate here:

* a scalar rejection sampler from a two-sided geometric proposal
  (:func:`sample_z`), the auditable reference path;
* a vectorized inverse-CDF sampler over the truncated window
  (:func:`sample_z_batch`), used on hot paths, falling back to a
  continuous-plus-rounding convolution for very wide Gaussians;
* a batched randomized nearest-plane walk (:func:`klein_batch`) over a
  cached orthogonalization, shared by the gadget-coset sampler and the
  integer-lattice preimage samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CovarianceNotPD,
    InternalError,
    InvalidParams,
    WidthTooSmall,
)
from .params import T_TAIL
from .ring import RingContext, RingElement, mulmod, unstack
from .rng import XofRng

_REJECT_CAP = 10_000
_CDT_WIDTH_LIMIT = 32.0
_CONV_ROUND_WIDTH = 8.0


@dataclass(frozen=True)
class GaussParams:
    """Width, center, and tail cut of a one-dimensional discrete Gaussian."""

    width: float
    center: float = 0.0
    tail_cut: float = float(T_TAIL)

    def __post_init__(self):
        if self.width < 1.0:
            raise WidthTooSmall(f"width {self.width} below the supported minimum 1.0")
        if self.tail_cut <= 0:
            raise InvalidParams("tail cut must be positive")


def sample_z(g: GaussParams, rng: XofRng) -> int:
    """One draw from D_{Z, width, center}.

    Rejection sampling: propose from a two-sided geometric (discrete
    Laplace) distribution with scale ``width / 2`` and accept with the
    ratio against the Gaussian weight, then apply the tail cut.
    """
    s, c, tail = g.width, g.center, g.tail_cut
    b = s / 2.0
    log_m = 1.0 / b + s * s / (4.0 * math.pi * b * b)
    c0 = math.floor(c)
    frac = c - c0
    p_geo = math.exp(-1.0 / b)
    for _ in range(_REJECT_CAP):
        u = rng.uniform01_scalar()
        mag = int(math.log(max(u, 2.0**-60)) / math.log(p_geo))
        if rng.bit():
            y = mag
        else:
            if mag == 0:
                continue
            y = -mag
        if abs(y - frac) > tail * s:
            continue
        log_accept = -math.pi * (y - frac) ** 2 / (s * s) + abs(y) / b - log_m
        if rng.uniform01_scalar() < math.exp(log_accept):
            return c0 + y
    raise InternalError("integer Gaussian rejection cap exhausted")


def sample_z_batch(
    width: float,
    centers: np.ndarray,
    rng: XofRng,
    tail_cut: float = float(T_TAIL),
) -> np.ndarray:
    """Vectorized draws from D_{Z, width, centers[i]}, one per center.

    Widths up to 32 use exact inverse-CDF sampling over the truncated
    window.  Wider Gaussians split into a continuous draw of the excess
    variance plus a narrow randomized rounding, whose convolution matches
    the target width.
    """
    if width < 1.0:
        raise WidthTooSmall(f"width {width} below the supported minimum 1.0")
    centers = np.asarray(centers, dtype=np.float64)
    flat = centers.reshape(-1)
    if width > _CDT_WIDTH_LIMIT:
        r = _CONV_ROUND_WIDTH
        sd_extra = math.sqrt(width * width - r * r) / math.sqrt(2.0 * math.pi)
        shifted = flat + rng.normal(flat.size) * sd_extra
        return _cdt_batch(r, shifted, rng, tail_cut).reshape(centers.shape)
    return _cdt_batch(width, flat, rng, tail_cut).reshape(centers.shape)


def _cdt_batch(width: float, centers: np.ndarray, rng: XofRng, tail_cut: float) -> np.ndarray:
    # Enumerating past 5.5 widths adds nothing: the relative weight out
    # there is under 1e-41, invisible to a float64 CDF.  The formal tail
    # cut still masks the window whenever it is the tighter bound.
    reach = tail_cut * width
    span = min(reach, 5.5 * width)
    lo = np.ceil(centers - span).astype(np.int64)
    window = int(math.floor(2.0 * span)) + 1
    offsets = np.arange(window, dtype=np.int64)
    cand = lo[:, None] + offsets[None, :]
    delta = cand.astype(np.float64) - centers[:, None]
    logp = -math.pi * delta * delta / (width * width)
    np.exp(logp, out=logp)
    if reach < span + 1.0:
        logp[np.abs(delta) > reach] = 0.0
    cdf = np.cumsum(logp, axis=1)
    totals = cdf[:, -1]
    if not (totals > 0).all():
        raise InternalError("empty discrete Gaussian window")
    u = rng.uniform01(centers.size) * totals
    idx = (cdf < u[:, None]).sum(axis=1)
    idx = np.minimum(idx, window - 1)
    return cand[np.arange(centers.size), idx]


def sample_ring(width: float, ctx: RingContext, rng: XofRng) -> RingElement:
    """One ring element with independent centered Gaussian coefficients."""
    return RingElement(
        sample_z_batch(width, np.zeros(ctx.n), rng) % ctx.q, ctx
    )


def sample_ring_vec(width: float, count: int, ctx: RingContext, rng: XofRng) -> list[RingElement]:
    return unstack(sample_ring_array(width, count, ctx, rng), ctx)


def sample_ring_array(width: float, count: int, ctx: RingContext, rng: XofRng) -> np.ndarray:
    """(count, n) canonical coefficient array of Gaussian ring elements."""
    draws = sample_z_batch(width, np.zeros((count, ctx.n)), rng)
    return draws % ctx.q


# ---------------------------------------------------------------------------
# Randomized nearest-plane over a cached orthogonalization
# ---------------------------------------------------------------------------


@dataclass
class OrthoBasis:
    """Integer basis columns with their Gram-Schmidt data (via QR)."""

    basis: np.ndarray      # (dim, dim) int64, columns are basis vectors
    gs_q: np.ndarray       # (dim, dim) float64, orthonormal directions
    gs_norms: np.ndarray   # (dim,) float64, orthogonalized column lengths

    @classmethod
    def from_basis(cls, basis: np.ndarray) -> "OrthoBasis":
        b = np.asarray(basis, dtype=np.int64)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise InvalidParams(f"basis must be square, got {b.shape}")
        q_mat, r_mat = np.linalg.qr(b.astype(np.float64))
        diag = np.diag(r_mat).copy()
        if (np.abs(diag) < 1e-9).any():
            raise InvalidParams("basis is numerically singular")
        flip = np.sign(diag)
        q_mat = q_mat * flip[None, :]
        return cls(basis=b, gs_q=q_mat, gs_norms=np.abs(diag))

    @property
    def max_gs_norm(self) -> float:
        return float(self.gs_norms.max())


def klein_batch(
    ortho: OrthoBasis,
    centers: np.ndarray,
    width: float,
    rng: XofRng,
    tail_cut: float = float(T_TAIL),
) -> np.ndarray:
    """Batched randomized nearest-plane: lattice points near each center.

    ``centers`` has shape (batch, dim); the result holds integer lattice
    vectors of :attr:`OrthoBasis.basis` distributed close to
    D_{Lambda, width, center} when ``width`` clears every per-level floor.
    """
    basis = ortho.basis
    dim = basis.shape[0]
    centers = np.atleast_2d(np.asarray(centers, dtype=np.float64))
    if centers.shape[1] != dim:
        raise InvalidParams(f"centers must have dimension {dim}")
    if width / float(ortho.gs_norms.max()) < 1.0:
        raise WidthTooSmall(
            f"width {width} under the orthogonalized norm {ortho.max_gs_norm}"
        )
    residual = centers.copy()
    out = np.zeros((centers.shape[0], dim), dtype=np.int64)
    for i in range(dim - 1, -1, -1):
        direction = ortho.gs_q[:, i]
        level_width = width / float(ortho.gs_norms[i])
        level_centers = residual @ direction / float(ortho.gs_norms[i])
        z = sample_z_batch(level_width, level_centers, rng, tail_cut)
        out += z[:, None] * basis[None, :, i]
        residual -= z[:, None].astype(np.float64) * basis[None, :, i].astype(np.float64)
    return out


# ---------------------------------------------------------------------------
# Gadget coset sampling
# ---------------------------------------------------------------------------


def gadget_vector(k: int) -> np.ndarray:
    """Powers of two (1, 2, ..., 2^(k-1))."""
    return np.int64(1) << np.arange(k, dtype=np.int64)


def gadget_basis(q: int, k: int) -> np.ndarray:
    """Public basis of the integer gadget kernel lattice.

    Column ``i < k-1`` is ``2 e_i - e_{i+1}``; the last column is the bit
    decomposition of ``q``.  Every column is orthogonal to the gadget
    vector modulo ``q``, and the orthogonalized norms stay below sqrt(5).
    """
    if k != int(q).bit_length():
        raise InvalidParams(f"gadget length {k} does not match modulus {q}")
    basis = np.zeros((k, k), dtype=np.int64)
    for i in range(k - 1):
        basis[i, i] = 2
        basis[i + 1, i] = -1
    basis[:, k - 1] = (q >> np.arange(k, dtype=np.int64)) & 1
    return basis


def bit_decompose(values: np.ndarray, k: int) -> np.ndarray:
    """(…, k) little-endian bits of nonnegative integers below 2^k."""
    v = np.asarray(values, dtype=np.int64)
    return (v[..., None] >> np.arange(k, dtype=np.int64)) & 1


@dataclass
class GadgetContext:
    """Cached gadget data for one modulus."""

    q: int
    k: int
    ortho: OrthoBasis

    @classmethod
    def for_modulus(cls, q: int) -> "GadgetContext":
        k = int(q).bit_length()
        return cls(q=q, k=k, ortho=OrthoBasis.from_basis(gadget_basis(q, k)))


_gadget_cache: dict[int, GadgetContext] = {}


def get_gadget(q: int) -> GadgetContext:
    g = _gadget_cache.get(q)
    if g is None:
        g = _gadget_cache[q] = GadgetContext.for_modulus(q)
    return g


def sample_g(width: float, v: int, q: int, rng: XofRng) -> np.ndarray:
    """One gadget-coset draw: z with <g, z> = v (mod q), Gaussian of the
    given width.  Conditional per-coordinate sampling runs over the public
    gadget kernel basis, walking the bit levels most-significant first."""
    return sample_g_batch(width, np.array([v], dtype=np.int64), q, rng)[0]


def sample_g_batch(width: float, targets: np.ndarray, q: int, rng: XofRng) -> np.ndarray:
    gadget = get_gadget(q)
    t = bit_decompose(np.asarray(targets, dtype=np.int64) % q, gadget.k)
    lattice = klein_batch(gadget.ortho, -t.astype(np.float64), width, rng)
    return t + lattice


def sample_poly_g(sigma: float, v: RingElement, rng: XofRng) -> list[RingElement]:
    """Gadget preimages of a ring target: k elements z with sum 2^i z_i = v.

    The coefficient slots are independent integer gadget cosets, so this is
    n batched calls of the scalar sampler at width sqrt(5) * sigma.
    """
    ctx = v.ctx
    width = math.sqrt(5.0) * sigma
    z = sample_g_batch(width, v.coeffs, ctx.q, rng)  # (n, k)
    return unstack(z.T % ctx.q, ctx)


def sample_poly_g_array(sigma: float, v_coeffs: np.ndarray, ctx: RingContext, rng: XofRng) -> np.ndarray:
    """(k, n) integer array variant of :func:`sample_poly_g` (unreduced)."""
    width = math.sqrt(5.0) * sigma
    return sample_g_batch(width, v_coeffs, ctx.q, rng).T


# ---------------------------------------------------------------------------
# Structured perturbations for the ring trapdoor
# ---------------------------------------------------------------------------


def embed_complex(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Evaluate real coefficient rows at the odd complex 2n-th roots."""
    twist = np.exp(1j * math.pi * np.arange(n) / n)
    return n * np.fft.ifft(np.asarray(coeffs, dtype=np.float64) * twist, axis=-1)


def unembed_complex(evals: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`embed_complex`; returns the real coefficient rows."""
    twist = np.exp(1j * math.pi * np.arange(n) / n)
    return (np.fft.fft(evals, axis=-1) / (n * twist)).real


def singular_norm_tagged(t_arr: np.ndarray, ctx: RingContext, iters: int = 50, tol: float = 1e-6) -> float:
    """Largest singular value of the stacked map [T; I] on coefficient space.

    Power iteration on the normal operator, run in the evaluation domain
    where each slot acts independently.
    """
    rows, k, n = t_arr.shape
    t_hat = embed_complex(ctx.balanced(t_arr), n)
    x = np.ones((k, n), dtype=np.complex128)
    x /= np.linalg.norm(x)
    value = 0.0
    for _ in range(iters):
        top = np.einsum("rkn,kn->rn", t_hat, x)
        back = np.einsum("rkn,rn->kn", t_hat.conj(), top) + x
        new_value = float(np.linalg.norm(back))
        x = back / new_value
        if abs(new_value - value) <= tol * max(new_value, 1.0):
            value = new_value
            break
        value = new_value
    return math.sqrt(value)


class PerturbationCov:
    """Covariance ``zeta^2 I - alpha^2 [T; I][T; I]*`` with sampling support.

    The covariance lives over the ring, so its coefficient embedding is
    block-diagonal in the evaluation domain: one Hermitian (k+rows) x
    (k+rows) matrix per slot.  Construction Cholesky-factors every slot
    (after reserving the randomized-rounding width) and caches the factors;
    :meth:`sample` then costs one batched matrix-vector product plus a
    rounding pass.
    """

    def __init__(
        self,
        zeta: float,
        alpha: float,
        t_arr: np.ndarray,
        ctx: RingContext,
        round_width: float = 1.0,
    ):
        rows, k, n = t_arr.shape
        if n != ctx.n:
            raise InvalidParams("trapdoor degree does not match context")
        if round_width < 1.0:
            raise WidthTooSmall("rounding width below 1.0")
        self.zeta = float(zeta)
        self.alpha = float(alpha)
        self.ctx = ctx
        self.rows = rows
        self.k = k
        self.m = rows + k
        self.round_width = float(round_width)

        t_hat = embed_complex(ctx.balanced(t_arr), n)          # (rows, k, n)
        m_stack = np.empty((n, self.m, k), dtype=np.complex128)
        m_stack[:, :rows, :] = np.moveaxis(t_hat, 2, 0)
        m_stack[:, rows:, :] = np.eye(k)[None, :, :]
        gram = m_stack @ m_stack.conj().transpose(0, 2, 1)      # (n, m, m)
        sigma = -(self.alpha**2) * gram
        diag = self.zeta**2 - self.round_width**2
        idx = np.arange(self.m)
        sigma[:, idx, idx] += diag
        try:
            self._chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError as exc:
            raise CovarianceNotPD(
                f"perturbation covariance not positive definite: zeta={zeta}, "
                f"alpha={alpha}"
            ) from exc
        pivots = np.abs(self._chol[:, idx, idx]) ** 2
        if float(pivots.min()) <= 1e-9 * self.zeta**2:
            raise CovarianceNotPD(
                f"smallest covariance pivot {float(pivots.min()):.3e} under "
                f"1e-9 * zeta^2"
            )

    def sample(self, rng: XofRng) -> np.ndarray:
        """(m, n) integer perturbation with covariance ``zeta^2 I - alpha^2 ...``."""
        n, m = self.ctx.n, self.m
        g = rng.normal(m * n).reshape(m, n)
        g_hat = embed_complex(g, n)
        y_hat = np.einsum("jab,bj->aj", self._chol, g_hat)
        y = unembed_complex(y_hat, n) / math.sqrt(2.0 * math.pi)
        return sample_z_batch(self.round_width, y, rng)


def sample_p(cov: PerturbationCov, rng: XofRng) -> list[RingElement]:
    """Perturbation vector as ring elements (coefficients reduced mod q)."""
    return unstack(cov.sample(rng) % cov.ctx.q, cov.ctx)
