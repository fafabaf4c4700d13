"""Integer-lattice machinery: exact modular algebra and trapdoor bases."""

import math

import numpy as np
import pytest

from pkeet.errors import RankError, WidthTooSmall
from pkeet.matlattice import (
    IntTrapdoorBasis,
    balanced_mod,
    mat_uniform,
    matmul_mod,
    matmul_small,
    rank_mod,
    sample_d,
    sample_d_batch,
    sample_left,
    solve_particular,
    trap_gen_int,
)
from conftest import seeded


def test_matmul_mod_matches_bigint_oracle():
    rng = seeded("matmul")
    q = (1 << 56) - 5
    a = rng.uniform_mod(q, 12).reshape(3, 4)
    b = rng.uniform_mod(q, 20).reshape(4, 5)
    got = matmul_mod(a, b, q)
    oracle = np.empty((3, 5), dtype=np.int64)
    for i in range(3):
        for j in range(5):
            acc = sum(int(a[i, t]) * int(b[t, j]) for t in range(4))
            oracle[i, j] = acc % q
    assert np.array_equal(got, oracle)


def test_matmul_mod_large_inner_dimension():
    rng = seeded("matmul-wide")
    q = 631848601
    a = rng.uniform_mod(q, 2 * 3000).reshape(2, 3000)
    b = rng.uniform_mod(q, 3000)
    got = matmul_mod(a, b.reshape(-1, 1), q).reshape(-1)
    oracle = [sum(int(x) * int(y) for x, y in zip(row, b)) % q for row in a]
    assert got.tolist() == oracle


def test_matmul_small_is_exact():
    rng = seeded("matmul-small")
    a = rng.uniform_mod(2001, 40 * 30).reshape(40, 30) - 1000
    b = rng.uniform_mod(2001, 30 * 20).reshape(30, 20) - 1000
    assert np.array_equal(matmul_small(a, b), a @ b)


def test_balanced_mod_range():
    q = 97
    vals = np.arange(0, q, dtype=np.int64)
    bal = balanced_mod(vals, q)
    assert int(bal.min()) >= -(q // 2) and int(bal.max()) <= q // 2
    assert np.array_equal(bal % q, vals)


def test_solver_and_rank():
    rng = seeded("solver")
    q = 12289
    a = rng.uniform_mod(q, 6 * 10).reshape(6, 10)
    x = rng.uniform_mod(q, 10 * 3).reshape(10, 3)
    b = matmul_mod(a, x, q)
    t = solve_particular(a, b, q)
    assert np.array_equal(matmul_mod(a, t, q), b)
    assert rank_mod(a, q) == 6

    deficient = np.vstack([a[0], (2 * a[0]) % q, a[1]])
    assert rank_mod(deficient, q) == 2
    with pytest.raises(RankError):
        solve_particular(deficient, rng.uniform_mod(q, 3).reshape(3, 1), q)


def test_trapdoor_matrix_and_basis(int_small):
    rng = seeded("int-trap")
    a_mat, basis = trap_gen_int(int_small, rng)
    n, m, q = int_small.n, int_small.m, int_small.q
    assert a_mat.shape == (n, m)
    assert basis.s.shape == (m, m)
    # Basis columns annihilate A mod q.
    assert not matmul_mod(a_mat, basis.s % q, q).any()
    # Full rank: the lattice is exactly the kernel, so det = +-q^n.
    sign, logdet = np.linalg.slogdet(basis.s.astype(np.float64))
    assert sign != 0
    assert abs(logdet - n * math.log(q)) < 1e-6 * n * math.log(q)
    # The short basis must beat the trivial q-ary basis by a wide margin.
    assert basis.ortho.max_gs_norm < q ** 0.5


def test_preimage_membership_and_center(int_small):
    rng = seeded("int-member")
    a_mat, basis = trap_gen_int(int_small, rng)
    q = int_small.q
    centers = rng.uniform_mod(q, 3 * int_small.m).reshape(3, int_small.m)
    out = sample_d_batch(basis, centers.astype(np.float64), int_small.sigma, rng)
    # Output lands in center + lattice: A(out - center) = 0 mod q.
    diff = (out - centers) % q
    assert not matmul_mod(a_mat, diff.T % q, q).any()
    # And stays near the origin, not near the (far) center.
    cap = int_small.t_tail * int_small.sigma * math.sqrt(int_small.m)
    norms = np.sqrt((out.astype(float) ** 2).sum(axis=1))
    assert float(norms.max()) <= cap


def test_scaled_integer_lattice_sampler():
    basis = IntTrapdoorBasis.from_matrix(np.eye(8, dtype=np.int64) * 3)
    rng = seeded("ident")
    width = 9.0
    center = np.full(8, 0.4)
    draws = np.stack([sample_d(basis, center, width, rng) for _ in range(2000)])
    # Membership: draws live on the coset center + 3Z^8.
    steps = (draws - center) / 3.0
    assert np.allclose(steps, np.rint(steps), atol=1e-9)
    # Each coordinate follows the width-9 Gaussian on the coset 0.4 + 3Z
    # centered at the origin; compare moments against direct summation.
    points = 0.4 + 3.0 * np.arange(-40, 41)
    w = np.exp(-math.pi * points**2 / width**2)
    w /= w.sum()
    want_mean = float((points * w).sum())
    want_var = float((points**2 * w).sum()) - want_mean**2
    flat = draws.reshape(-1)
    assert abs(float(flat.mean()) - want_mean) < 0.1
    assert abs(float(flat.var()) / want_var - 1.0) < 0.10


def test_width_guard(int_small):
    rng = seeded("width-guard")
    _, basis = trap_gen_int(int_small, rng)
    with pytest.raises(WidthTooSmall):
        sample_d_batch(basis, np.zeros((1, int_small.m)), 1.0, rng)


def test_left_sampler_exact_and_gaussian(int_small):
    rng = seeded("left")
    q = int_small.q
    a_mat, basis = trap_gen_int(int_small, rng)
    m1 = mat_uniform(q, int_small.n, int_small.m, rng)
    f_mat = np.concatenate([a_mat, m1], axis=1)
    u_mat = mat_uniform(q, int_small.n, 5, rng)
    e = sample_left(a_mat, m1, basis, u_mat, int_small.sigma, rng, q)
    assert e.shape == (2 * int_small.m, 5)
    assert np.array_equal(matmul_mod(f_mat, e % q, q), u_mat)
    sd = int_small.sigma / math.sqrt(2 * math.pi)
    emp = float(e.astype(float).std())
    assert 0.5 * sd < emp < 2.0 * sd
