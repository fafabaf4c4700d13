"""Integer-lattice machinery: exact mod-q linear algebra, trapdoor matrix
generation with an explicit short kernel basis, and Gaussian sampling over
lattice cosets.

The trapdoor generator outputs ``A = [A_bar | G - A_bar R]`` for a small
random ``R``, together with a short basis ``S`` of the kernel lattice
``{x : A x = 0 mod q}``.  The basis columns come in two blocks: gadget
kernel relations pushed through ``[R; I]``, and per-column completions
``(e_i + R w_i; w_i)`` built from bit decompositions of ``-A_bar``.  The
block determinant telescopes to the gadget basis determinant, so ``S`` is
always rationally nonsingular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GenerationFailed, InvalidParams, RankError, WidthTooSmall
from .params import ParamsInt
from .ring import mulmod
from .rng import XofRng
from .sampling import OrthoBasis, bit_decompose, gadget_basis, klein_batch, sample_z_batch

_TRAPGEN_RETRIES = 8
_MATMUL_Q_CAP = 1 << 56   # elementwise products ride the exact mulmod kernel


def balanced_mod(values: np.ndarray, q: int) -> np.ndarray:
    """Signed representatives in (-q/2, q/2]."""
    values = np.asarray(values, dtype=np.int64) % q
    return values - q * (values > q // 2)


def matmul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Exact ``a @ b mod q`` for residue matrices of any supported modulus.

    Each elementwise product is reduced before accumulation, so row sums
    stay far below the int64 ceiling; output columns are processed in
    blocks to bound the temporary.
    """
    if q >= _MATMUL_Q_CAP:
        raise InvalidParams(f"modulus too large for exact matmul: {q}")
    a = np.asarray(a, dtype=np.int64) % q
    b = np.asarray(b, dtype=np.int64) % q
    rows, inner = a.shape
    inner_b, cols = b.shape
    if inner != inner_b:
        raise InvalidParams(f"matmul shapes {a.shape} x {b.shape} do not align")
    chunk_terms = max(1, (1 << 62) // max(1, q))   # summands per partial sum
    out = np.zeros((rows, cols), dtype=np.int64)
    col_block = max(1, (1 << 22) // max(1, inner))
    for j0 in range(0, cols, col_block):
        j1 = min(cols, j0 + col_block)
        acc = np.zeros((rows, j1 - j0), dtype=np.int64)
        for k0 in range(0, inner, chunk_terms):
            k1 = min(inner, k0 + chunk_terms)
            prod = mulmod(a[:, k0:k1, None], b[None, k0:k1, j0:j1], q)
            acc = (acc + prod.sum(axis=1)) % q
        out[:, j0:j1] = acc
    return out


def mat_uniform(q: int, rows: int, cols: int, rng: XofRng) -> np.ndarray:
    return rng.uniform_mod(q, rows * cols).reshape(rows, cols)


def matmul_small(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact integer product of small-entry matrices through float64 BLAS.

    Valid while every inner sum stays below 2^53; the bound is checked from
    the entry magnitudes before trusting the rounded result.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    bound = a.shape[1] * int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0))
    if bound >= 1 << 53:
        return a @ b
    return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)


def _row_reduce(mat: np.ndarray, q: int) -> tuple[np.ndarray, list[int]]:
    """In-place style Gauss-Jordan over Z_q (q prime): returns (rref, pivots)."""
    m = np.asarray(mat, dtype=np.int64) % q
    rows, cols = m.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        hit = np.nonzero(m[row:, col])[0]
        if hit.size == 0:
            continue
        r = row + int(hit[0])
        if r != row:
            m[[row, r]] = m[[r, row]]
        inv = pow(int(m[row, col]), q - 2, q)
        m[row] = mulmod(m[row], np.int64(inv), q)
        factors = m[:, col].copy()
        factors[row] = 0
        m = (m - mulmod(factors[:, None], m[row][None, :], q)) % q
        pivots.append(col)
        row += 1
    return m, pivots


def rank_mod(mat: np.ndarray, q: int) -> int:
    return len(_row_reduce(mat, q)[1])


def solve_particular(a_mat: np.ndarray, b_mat: np.ndarray, q: int) -> np.ndarray:
    """Some ``X`` with ``A X = B mod q``; raises :class:`RankError` if the
    rows of ``A`` do not span (solutions then need not exist)."""
    a_mat = np.asarray(a_mat, dtype=np.int64)
    b_mat = np.asarray(b_mat, dtype=np.int64)
    n, m = a_mat.shape
    if b_mat.shape[0] != n:
        raise InvalidParams(f"solve shapes {a_mat.shape} vs {b_mat.shape}")
    rref, pivots = _row_reduce(np.concatenate([a_mat % q, b_mat % q], axis=1), q)
    if len(pivots) < n or pivots[-1] >= m:
        raise RankError("coefficient matrix does not have full row rank mod q")
    x = np.zeros((m, b_mat.shape[1]), dtype=np.int64)
    for r, col in enumerate(pivots):
        x[col] = rref[r, m:]
    return x


# ---------------------------------------------------------------------------
# Trapdoor generation
# ---------------------------------------------------------------------------


@dataclass
class IntTrapdoorBasis:
    """Short signed basis of the kernel lattice with its orthogonalization."""

    s: np.ndarray              # (m, m) int64, columns are basis vectors
    ortho: OrthoBasis

    @property
    def dim(self) -> int:
        return self.s.shape[0]

    @property
    def max_gs_norm(self) -> float:
        return self.ortho.max_gs_norm

    @classmethod
    def from_matrix(cls, s: np.ndarray) -> "IntTrapdoorBasis":
        s = np.asarray(s, dtype=np.int64)
        return cls(s=s, ortho=OrthoBasis.from_basis(s))


def _signed_bound_ok(a: np.ndarray, b: np.ndarray) -> bool:
    """True when a direct int64 product of the two matrices cannot overflow."""
    bound = a.shape[1] * int(np.abs(a).max(initial=0)) * int(np.abs(b).max(initial=0))
    return bound < 1 << 62


def _gadget_rows(q: int, n: int, k: int) -> np.ndarray:
    """Block-diagonal stack of gadget rows: (n, n*k) with powers of two."""
    g = np.zeros((n, n * k), dtype=np.int64)
    powers = np.int64(1) << np.arange(k, dtype=np.int64)
    for i in range(n):
        g[i, i * k : (i + 1) * k] = powers
    return g


def _bit_columns(mat: np.ndarray, q: int, k: int) -> np.ndarray:
    """(n*k, cols) bit matrix W with G W = mat (mod q), columnwise."""
    n, cols = mat.shape
    bits = bit_decompose(np.asarray(mat, dtype=np.int64) % q, k)   # (n, cols, k)
    return bits.transpose(0, 2, 1).reshape(n * k, cols)


def trap_gen_int(params: ParamsInt, rng: XofRng) -> tuple[np.ndarray, IntTrapdoorBasis]:
    """Near-uniform ``A`` (n x m) with a short basis of its kernel lattice."""
    n, k, q = params.n, params.k, params.q
    nk = n * k
    m_bar = params.m_bar
    if params.m != m_bar + nk:
        raise InvalidParams("matrix width must split as m_bar + n*k")

    s_g = np.kron(np.eye(n, dtype=np.int64), gadget_basis(q, k))
    for _ in range(_TRAPGEN_RETRIES):
        a_bar = mat_uniform(q, n, m_bar, rng)
        r_small = sample_z_batch(params.sigma_r, np.zeros((m_bar, nk)), rng)

        gadget = _gadget_rows(q, n, k)
        a_tail = (
            (gadget - a_bar @ r_small) % q
            if _signed_bound_ok(a_bar, r_small)
            else (gadget - matmul_mod(a_bar, r_small % q, q)) % q
        )
        a_mat = np.concatenate([a_bar, a_tail], axis=1)
        if rank_mod(a_mat, q) < n:
            continue

        w_bits = _bit_columns((-a_bar) % q, q, k)                  # (nk, m_bar)
        top = np.concatenate(
            [
                matmul_small(r_small, s_g),
                np.eye(m_bar, dtype=np.int64) + matmul_small(r_small, w_bits),
            ],
            axis=1,
        )
        bottom = np.concatenate([s_g, w_bits], axis=1)
        s = np.concatenate([top, bottom], axis=0)
        basis = IntTrapdoorBasis.from_matrix(s)

        residual = (a_mat @ s) % q if _signed_bound_ok(a_mat, s) else matmul_mod(
            a_mat, s % q, q
        )
        if residual.any():
            raise GenerationFailed("kernel basis failed the exact congruence")
        return a_mat, basis
    raise GenerationFailed(
        f"no full-rank matrix after {_TRAPGEN_RETRIES} attempts"
    )


# ---------------------------------------------------------------------------
# Coset sampling
# ---------------------------------------------------------------------------


def _width_guard(sigma: float, basis: IntTrapdoorBasis, dim: int) -> None:
    floor = basis.max_gs_norm * np.sqrt(np.log(dim))
    if sigma < floor:
        raise WidthTooSmall(
            f"width {sigma:.3f} under the operational floor {floor:.3f}"
        )


def sample_d_batch(
    basis: IntTrapdoorBasis, centers: np.ndarray, sigma: float, rng: XofRng
) -> np.ndarray:
    """Rows of Gaussian draws from ``center + Lambda``, centered near zero."""
    centers = np.atleast_2d(np.asarray(centers))
    _width_guard(sigma, basis, basis.dim)
    near = klein_batch(basis.ortho, -centers.astype(np.float64), sigma, rng)
    return centers + near


def sample_d(
    basis: IntTrapdoorBasis, center: np.ndarray, sigma: float, rng: XofRng
) -> np.ndarray:
    return sample_d_batch(basis, center[None, :], sigma, rng)[0]


def sample_left(
    a_mat: np.ndarray,
    m1_mat: np.ndarray,
    basis: IntTrapdoorBasis,
    u_mat: np.ndarray,
    sigma: float,
    rng: XofRng,
    q: int,
) -> np.ndarray:
    """Columns ``e`` with ``(A | M1) e = U mod q`` and Gaussian profile.

    The second half of each column is a fresh Gaussian; the first half is a
    coset sample against the adjusted syndrome, so the congruence is exact
    by construction.
    """
    a_mat = np.asarray(a_mat, dtype=np.int64)
    m1_mat = np.asarray(m1_mat, dtype=np.int64)
    u_mat = np.asarray(u_mat, dtype=np.int64)
    n, m = a_mat.shape
    m1c = m1_mat.shape[1]
    t = u_mat.shape[1]
    _width_guard(sigma, basis, m + m1c)

    e2 = sample_z_batch(sigma, np.zeros((m1c, t)), rng)
    target = (u_mat - matmul_mod(m1_mat, e2 % q, q)) % q
    t_part = solve_particular(a_mat, target, q)                   # (m, t)
    e1 = sample_d_batch(basis, t_part.T, sigma, rng).T            # (m, t)
    return np.concatenate([e1, e2], axis=0)
