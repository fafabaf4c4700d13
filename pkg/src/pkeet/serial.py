"""Framed binary serialization for keys, ciphertexts, and trapdoor tokens.

Every file is one frame: a fixed 23-byte header (magic, version, scheme,
kind, parameter digest, payload length) followed by the payload.  The
payload embeds the canonical parameter text, then the object's arrays as
raw little-endian 64-bit integers in a fixed order, so encoding is a
bijection: decode(encode(x)) == x and re-encoding decoded bytes is
byte-identical.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import FramingError, ParamsMismatch, PkeetError
from .matlattice import IntTrapdoorBasis
from .params import ParamsInt, ParamsRing, params_from_text, validate
from .pkeet_int import CtInt, PkInt, SkInt, TrapdoorTokenInt
from .pkeet_ring import CtRing, PkRing, SkRing, TrapdoorTokenRing
from .ring import RingElement, get_context
from .trapdoor_ring import RingTrapdoor, TaggedVector

MAGIC = b"LPKT"
VERSION = 1
SCHEME_RING = 1
SCHEME_INT = 2
KIND_PK = 1
KIND_SK = 2
KIND_CT = 3
KIND_TD = 4
KIND_PARAMS = 5

_HEADER = struct.Struct("<4sBBB8sQ")


def _arrays_bytes(arrays: list[np.ndarray]) -> bytes:
    return b"".join(
        np.ascontiguousarray(a, dtype=np.int64).astype("<i8").tobytes()
        for a in arrays
    )


class _Reader:
    def __init__(self, body: bytes):
        self.body = body
        self.pos = 0

    def take(self, shape: tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(shape))
        nbytes = 8 * count
        if self.pos + nbytes > len(self.body):
            raise FramingError("payload shorter than the declared object")
        arr = np.frombuffer(self.body, dtype="<i8", count=count, offset=self.pos)
        self.pos += nbytes
        return arr.astype(np.int64).reshape(shape)

    def done(self) -> None:
        if self.pos != len(self.body):
            raise FramingError("payload longer than the declared object")


def encode_frame(scheme: int, kind: int, params, body: bytes) -> bytes:
    text = params.canonical_text().encode()
    payload = struct.pack("<I", len(text)) + text + body
    header = _HEADER.pack(MAGIC, VERSION, scheme, kind, params.digest(), len(payload))
    return header + payload


def decode_frame(data: bytes) -> tuple[int, int, ParamsRing | ParamsInt, bytes]:
    if len(data) < _HEADER.size:
        raise FramingError("file shorter than a frame header")
    magic, version, scheme, kind, digest, length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FramingError(f"bad magic {magic!r}")
    if version != VERSION:
        raise FramingError(f"unsupported version {version}")
    payload = data[_HEADER.size :]
    if len(payload) != length:
        raise FramingError(
            f"payload length {len(payload)} does not match header {length}"
        )
    if len(payload) < 4:
        raise FramingError("payload missing the parameter block")
    (text_len,) = struct.unpack_from("<I", payload)
    text = payload[4 : 4 + text_len]
    if len(text) != text_len:
        raise FramingError("parameter block truncated")
    try:
        params = params_from_text(text.decode())
    except (PkeetError, UnicodeDecodeError, ValueError) as exc:
        raise FramingError(f"unreadable parameter block: {exc}") from exc
    if params.digest() != digest:
        raise FramingError("parameter digest does not match the embedded record")
    bad = validate(params)
    if bad:
        raise FramingError(f"embedded parameters violate invariants: {bad}")
    expect_scheme = SCHEME_RING if isinstance(params, ParamsRing) else SCHEME_INT
    if scheme != expect_scheme:
        raise FramingError("scheme byte does not match the parameter record")
    return scheme, kind, params, payload[4 + text_len :]


# ---------------------------------------------------------------------------
# Ring scheme codecs
# ---------------------------------------------------------------------------


def _zero_tagged(vec: np.ndarray, params: ParamsRing) -> TaggedVector:
    ctx = get_context(params)
    zero = RingElement(np.zeros(ctx.n, dtype=np.int64), ctx)
    return TaggedVector(vec=vec % params.q, tag=zero, ctx=ctx, trapdoor=None)


def _ring_trapdoor(t_arr: np.ndarray, params: ParamsRing) -> RingTrapdoor:
    return RingTrapdoor(
        t_arr=t_arr % params.q, width=params.sigma_trap, ctx=get_context(params)
    )


def encode_ring_pk(pk: PkRing, params: ParamsRing) -> bytes:
    body = _arrays_bytes([pk.a.vec, pk.b.vec, pk.u.coeffs])
    return encode_frame(SCHEME_RING, KIND_PK, params, body)


def decode_ring_pk(body: bytes, params: ParamsRing) -> PkRing:
    m, n = params.m, params.n
    r = _Reader(body)
    a_vec, b_vec, u = r.take((m, n)), r.take((m, n)), r.take((n,))
    r.done()
    ctx = get_context(params)
    return PkRing(
        a=_zero_tagged(a_vec, params),
        b=_zero_tagged(b_vec, params),
        u=RingElement(u % params.q, ctx),
    )


def encode_ring_sk(sk: SkRing, params: ParamsRing) -> bytes:
    body = _arrays_bytes([sk.t_a.t_arr, sk.t_b.t_arr])
    return encode_frame(SCHEME_RING, KIND_SK, params, body)


def decode_ring_sk(body: bytes, params: ParamsRing) -> SkRing:
    shape = (params.base_len, params.k, params.n)
    r = _Reader(body)
    t_a, t_b = r.take(shape), r.take(shape)
    r.done()
    return SkRing(t_a=_ring_trapdoor(t_a, params), t_b=_ring_trapdoor(t_b, params))


def encode_ring_ct(ct: CtRing, params: ParamsRing) -> bytes:
    body = _arrays_bytes(
        [ct.sig, ct.v[0].coeffs, ct.v[1].coeffs, ct.ct1.coeffs, ct.ct2.coeffs, ct.ct3, ct.ct4]
    )
    return encode_frame(SCHEME_RING, KIND_CT, params, body)


def decode_ring_ct(body: bytes, params: ParamsRing) -> CtRing:
    m, n, q = params.m, params.n, params.q
    ctx = get_context(params)
    r = _Reader(body)
    sig = r.take((params.base_len, n))
    v0, v1 = r.take((n,)), r.take((n,))
    ct1, ct2 = r.take((n,)), r.take((n,))
    ct3, ct4 = r.take((m, n)), r.take((m, n))
    r.done()
    return CtRing(
        sig=sig % q,
        v=(RingElement(v0 % q, ctx), RingElement(v1 % q, ctx)),
        ct1=RingElement(ct1 % q, ctx),
        ct2=RingElement(ct2 % q, ctx),
        ct3=ct3 % q,
        ct4=ct4 % q,
    )


def encode_ring_td(td: TrapdoorTokenRing, params: ParamsRing) -> bytes:
    body = _arrays_bytes([td.t_b.t_arr, td.b.vec, td.u.coeffs])
    return encode_frame(SCHEME_RING, KIND_TD, params, body)


def decode_ring_td(body: bytes, params: ParamsRing) -> TrapdoorTokenRing:
    r = _Reader(body)
    t_b = r.take((params.base_len, params.k, params.n))
    b_vec = r.take((params.m, params.n))
    u = r.take((params.n,))
    r.done()
    return TrapdoorTokenRing(
        t_b=_ring_trapdoor(t_b, params),
        b=_zero_tagged(b_vec, params),
        u=RingElement(u % params.q, get_context(params)),
    )


# ---------------------------------------------------------------------------
# Integer scheme codecs
# ---------------------------------------------------------------------------


def encode_int_pk(pk: PkInt, params: ParamsInt) -> bytes:
    body = _arrays_bytes([pk.a, pk.a_prime, *pk.a_list, pk.b, pk.u])
    return encode_frame(SCHEME_INT, KIND_PK, params, body)


def decode_int_pk(body: bytes, params: ParamsInt) -> PkInt:
    n, m, q = params.n, params.m, params.q
    r = _Reader(body)
    a = r.take((n, m)) % q
    a_prime = r.take((n, m)) % q
    a_list = [r.take((n, m)) % q for _ in range(params.l)]
    b = r.take((n, m)) % q
    u = r.take((n, params.t_msg)) % q
    r.done()
    return PkInt(a=a, a_prime=a_prime, a_list=a_list, b=b, u=u)


def encode_int_sk(sk: SkInt, params: ParamsInt) -> bytes:
    body = _arrays_bytes([sk.s_a.s, sk.s_a_prime.s])
    return encode_frame(SCHEME_INT, KIND_SK, params, body)


def decode_int_sk(body: bytes, params: ParamsInt) -> SkInt:
    m = params.m
    r = _Reader(body)
    s_a, s_ap = r.take((m, m)), r.take((m, m))
    r.done()
    return SkInt(
        s_a=IntTrapdoorBasis.from_matrix(s_a),
        s_a_prime=IntTrapdoorBasis.from_matrix(s_ap),
    )


def encode_int_ct(ct: CtInt, params: ParamsInt) -> bytes:
    body = _arrays_bytes([ct.c1, ct.c2, ct.c3, ct.c4, ct.u, ct.d])
    return encode_frame(SCHEME_INT, KIND_CT, params, body)


def decode_int_ct(body: bytes, params: ParamsInt) -> CtInt:
    q = params.q
    r = _Reader(body)
    c1 = r.take((params.t_msg,)) % q
    c2 = r.take((params.t_msg,)) % q
    c3 = r.take((2 * params.m,)) % q
    c4 = r.take((2 * params.m,)) % q
    u = r.take((params.m,)) % q
    d = r.take((params.n, params.k_sig)) % q
    r.done()
    return CtInt(c1=c1, c2=c2, c3=c3, c4=c4, u=u, d=d)


def encode_int_td(td: TrapdoorTokenInt, params: ParamsInt) -> bytes:
    body = _arrays_bytes([td.s_a_prime.s, td.a_prime, *td.a_list, td.b, td.u])
    return encode_frame(SCHEME_INT, KIND_TD, params, body)


def decode_int_td(body: bytes, params: ParamsInt) -> TrapdoorTokenInt:
    n, m, q = params.n, params.m, params.q
    r = _Reader(body)
    s_ap = r.take((m, m))
    a_prime = r.take((n, m)) % q
    a_list = [r.take((n, m)) % q for _ in range(params.l)]
    b = r.take((n, m)) % q
    u = r.take((n, params.t_msg)) % q
    r.done()
    return TrapdoorTokenInt(
        s_a_prime=IntTrapdoorBasis.from_matrix(s_ap),
        a_prime=a_prime,
        a_list=a_list,
        b=b,
        u=u,
    )


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

_ENCODERS = {
    (SCHEME_RING, KIND_PK): encode_ring_pk,
    (SCHEME_RING, KIND_SK): encode_ring_sk,
    (SCHEME_RING, KIND_CT): encode_ring_ct,
    (SCHEME_RING, KIND_TD): encode_ring_td,
    (SCHEME_INT, KIND_PK): encode_int_pk,
    (SCHEME_INT, KIND_SK): encode_int_sk,
    (SCHEME_INT, KIND_CT): encode_int_ct,
    (SCHEME_INT, KIND_TD): encode_int_td,
}

_DECODERS = {
    (SCHEME_RING, KIND_PK): decode_ring_pk,
    (SCHEME_RING, KIND_SK): decode_ring_sk,
    (SCHEME_RING, KIND_CT): decode_ring_ct,
    (SCHEME_RING, KIND_TD): decode_ring_td,
    (SCHEME_INT, KIND_PK): decode_int_pk,
    (SCHEME_INT, KIND_SK): decode_int_sk,
    (SCHEME_INT, KIND_CT): decode_int_ct,
    (SCHEME_INT, KIND_TD): decode_int_td,
}


def encode_object(scheme: int, kind: int, obj, params) -> bytes:
    if kind == KIND_PARAMS:
        return encode_frame(scheme, kind, params, b"")
    enc = _ENCODERS.get((scheme, kind))
    if enc is None:
        raise FramingError(f"no encoder for scheme={scheme} kind={kind}")
    return enc(obj, params)


def decode_object(data: bytes, expect_kind: int | None = None):
    """Decode a frame into (scheme, kind, params, object)."""
    scheme, kind, params, body = decode_frame(data)
    if expect_kind is not None and kind != expect_kind:
        raise FramingError(f"expected kind {expect_kind}, found {kind}")
    if kind == KIND_PARAMS:
        if body:
            raise FramingError("parameter frame carries an unexpected body")
        return scheme, kind, params, params
    dec = _DECODERS.get((scheme, kind))
    if dec is None:
        raise FramingError(f"no decoder for scheme={scheme} kind={kind}")
    return scheme, kind, params, dec(body, params)


def require_same_params(*records) -> None:
    first = records[0]
    for rec in records[1:]:
        if rec.canonical_text() != first.canonical_text():
            raise ParamsMismatch("input files were produced under different parameters")
