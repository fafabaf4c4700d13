"""Public-key encryption with equality test over integer lattices.

Structure mirrors the ring scheme: two trapdoored matrices ``A`` (message
slot) and ``A'`` (hash slot) share a syndrome matrix ``U``; ciphertexts
carry two masked payload vectors and two doubled-width vector slots formed
under selector-dependent matrices ``(A | B + sum b_i A_i)``.  Binding uses
the matrix one-time signature whose public key ``D`` seeds the selector
hash, with the signature vector ``u`` checked for both the linear identity
and shortness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidMessage, RejectHash, RejectSignature
from .hashing import hash_message, hash_pm_one, hash_weighted
from .matlattice import (
    IntTrapdoorBasis,
    balanced_mod,
    mat_uniform,
    matmul_mod,
    sample_left,
    trap_gen_int,
    _signed_bound_ok,
)
from .ots import ots_sis_keygen, ots_sis_verify
from .params import ParamsInt
from .rng import XofRng


@dataclass
class PkInt:
    """Public matrices: two trapdoored slots, selector family, syndrome."""

    a: np.ndarray              # (n, m)
    a_prime: np.ndarray        # (n, m)
    a_list: list[np.ndarray]   # l matrices (n, m)
    b: np.ndarray              # (n, m)
    u: np.ndarray              # (n, t_msg)


@dataclass
class SkInt:
    """Kernel bases for the two trapdoored matrices."""

    s_a: IntTrapdoorBasis
    s_a_prime: IntTrapdoorBasis


@dataclass
class CtInt:
    """Ciphertext: payload slots, vector slots, signature vector, one-time
    public matrix."""

    c1: np.ndarray             # (t_msg,)
    c2: np.ndarray             # (t_msg,)
    c3: np.ndarray             # (2m,)
    c4: np.ndarray             # (2m,)
    u: np.ndarray              # (m,) residues
    d: np.ndarray              # (n, k_sig)


@dataclass
class TrapdoorTokenInt:
    """Equality-test token: hash-slot basis plus the public material the
    test needs."""

    s_a_prime: IntTrapdoorBasis
    a_prime: np.ndarray
    a_list: list[np.ndarray]
    b: np.ndarray
    u: np.ndarray


def setup_int(params: ParamsInt, rng: XofRng) -> tuple[PkInt, SkInt]:
    a_mat, s_a = trap_gen_int(params, rng)
    a_prime, s_a_prime = trap_gen_int(params, rng)
    a_list = [mat_uniform(params.q, params.n, params.m, rng) for _ in range(params.l)]
    b_mat = mat_uniform(params.q, params.n, params.m, rng)
    u_mat = mat_uniform(params.q, params.n, params.t_msg, rng)
    pk = PkInt(a=a_mat, a_prime=a_prime, a_list=a_list, b=b_mat, u=u_mat)
    return pk, SkInt(s_a=s_a, s_a_prime=s_a_prime)


def _vec_bytes(*arrays: np.ndarray) -> bytes:
    """Canonical little-endian byte view of residue arrays, for hashing."""
    return b"".join(np.ascontiguousarray(a).astype("<u8").tobytes() for a in arrays)


def _noise(count: int, params: ParamsInt, rng: XofRng) -> np.ndarray:
    """Signed rounded-Gaussian noise: round(q * X) for X of width alpha."""
    sd = params.alpha * params.q / np.sqrt(2.0 * np.pi)
    return np.rint(rng.normal(count) * sd).astype(np.int64)


def _selector_sum(pk_b: np.ndarray, a_list: list[np.ndarray], sel: np.ndarray, q: int) -> np.ndarray:
    acc = pk_b.copy()
    for b_i, a_i in zip(sel, a_list):
        acc += b_i * a_i
    return acc % q


def _decode(w: np.ndarray, q: int) -> np.ndarray:
    lo = -(-q // 4)
    hi = (3 * q) // 4
    w = w % q
    return ((w >= lo) & (w < hi)).astype(np.int64)


def _dot_cols(e: np.ndarray, c: np.ndarray, q: int) -> np.ndarray:
    """Columnwise inner products e^T c (mod q) with overflow-safe fallback."""
    if _signed_bound_ok(e.T, c[:, None]):
        return (e.T @ c) % q
    return matmul_mod(e.T % q, c[:, None], q)[:, 0]


def encrypt_int(pk: PkInt, msg: np.ndarray, params: ParamsInt, rng: XofRng) -> CtInt:
    """Encrypt a bit vector of length ``t_msg``."""
    q, m = params.q, params.m
    msg = np.asarray(msg, dtype=np.int64)
    if msg.shape != (params.t_msg,) or ((msg != 0) & (msg != 1)).any():
        raise InvalidMessage(f"message must be a 0/1 vector of length {params.t_msg}")

    ots_keys = ots_sis_keygen(pk.a, params, rng)
    d_pub = ots_keys.pub                                           # (n, k_sig)

    s1 = rng.uniform_mod(q, params.n)
    s2 = rng.uniform_mod(q, params.n)
    half = q // 2
    c1 = (matmul_mod(pk.u.T, s1[:, None], q)[:, 0] + _noise(params.t_msg, params, rng) + half * msg) % q
    hash_bits = hash_message(params, _vec_bytes(msg))
    c2 = (matmul_mod(pk.u.T, s2[:, None], q)[:, 0] + _noise(params.t_msg, params, rng) + half * hash_bits) % q

    sel = hash_pm_one(params, _vec_bytes(c1, c2, d_pub), params.l)
    a_sum = _selector_sum(pk.b, pk.a_list, sel, q)
    f1 = np.concatenate([pk.a, a_sum], axis=1)
    f2 = np.concatenate([pk.a_prime, a_sum], axis=1)

    # Selector-weighted sum of fresh sign matrices, accumulated one at a
    # time so only two m x m blocks are ever alive.
    r_sum = np.zeros((m, m), dtype=np.int64)
    for b_i in sel:
        r_sum += b_i * rng.sign_bits(m * m).reshape(m, m)

    y1 = _noise(m, params, rng)
    y2 = _noise(m, params, rng)
    c3 = (matmul_mod(f1.T, s1[:, None], q)[:, 0] + np.concatenate([y1, r_sum.T @ y1])) % q
    c4 = (matmul_mod(f2.T, s2[:, None], q)[:, 0] + np.concatenate([y2, r_sum.T @ y2])) % q

    d_sel = hash_weighted(params, _vec_bytes(c1, c2, c3, c4), params.k_sig, params.w_sig)
    u_sig = (ots_keys.key @ d_sel) % q
    return CtInt(c1=c1, c2=c2, c3=c3, c4=c4, u=u_sig, d=d_pub)


def _check_signature(pk_a: np.ndarray, ct: CtInt, params: ParamsInt) -> None:
    d_sel = hash_weighted(
        params, _vec_bytes(ct.c1, ct.c2, ct.c3, ct.c4), params.k_sig, params.w_sig
    )
    sig = balanced_mod(ct.u, params.q)
    if not ots_sis_verify(pk_a, ct.d, d_sel, sig, params):
        raise RejectSignature("signature vector fails the one-time check")


def _open_slot_int(
    payload: np.ndarray,
    vec_slot: np.ndarray,
    left: np.ndarray,
    basis: IntTrapdoorBasis,
    a_sum: np.ndarray,
    u_mat: np.ndarray,
    params: ParamsInt,
    rng: XofRng,
) -> np.ndarray:
    e = sample_left(left, a_sum, basis, u_mat, params.sigma, rng, params.q)
    return _decode(payload - _dot_cols(e, vec_slot, params.q), params.q)


def decrypt_int(
    pk: PkInt, sk: SkInt, ct: CtInt, params: ParamsInt, rng: XofRng
) -> np.ndarray:
    """Recover the message bits, or raise a typed rejection."""
    q = params.q
    _check_signature(pk.a, ct, params)

    sel = hash_pm_one(params, _vec_bytes(ct.c1, ct.c2, ct.d), params.l)
    a_sum = _selector_sum(pk.b, pk.a_list, sel, q)

    msg = _open_slot_int(ct.c1, ct.c3, pk.a, sk.s_a, a_sum, pk.u, params, rng)
    hash_bits = _open_slot_int(ct.c2, ct.c4, pk.a_prime, sk.s_a_prime, a_sum, pk.u, params, rng)
    if not np.array_equal(hash_bits, hash_message(params, _vec_bytes(msg))):
        raise RejectHash("decoded hash slot does not match the message hash")
    return msg


def trapdoor_int(sk: SkInt, pk: PkInt) -> TrapdoorTokenInt:
    return TrapdoorTokenInt(
        s_a_prime=sk.s_a_prime,
        a_prime=pk.a_prime.copy(),
        a_list=[a.copy() for a in pk.a_list],
        b=pk.b.copy(),
        u=pk.u.copy(),
    )


def _test_side_int(
    td: TrapdoorTokenInt, ct: CtInt, params: ParamsInt, rng: XofRng
) -> np.ndarray:
    sel = hash_pm_one(params, _vec_bytes(ct.c1, ct.c2, ct.d), params.l)
    a_sum = _selector_sum(td.b, td.a_list, sel, params.q)
    return _open_slot_int(
        ct.c2, ct.c4, td.a_prime, td.s_a_prime, a_sum, td.u, params, rng
    )


def test_int(
    td_i: TrapdoorTokenInt,
    td_j: TrapdoorTokenInt,
    ct_i: CtInt,
    ct_j: CtInt,
    params: ParamsInt,
    rng: XofRng,
) -> int:
    """1 iff the two ciphertexts hide the same message (hash-slot equality)."""
    side_i = _test_side_int(td_i, ct_i, params, rng)
    side_j = _test_side_int(td_j, ct_j, params, rng)
    return int(np.array_equal(side_i, side_j))
