"""Domain-separated hash maps built on a single SHAKE-256 XOF.

Every map frames its input as ``tag || params-digest || [counter] || payload``
and expands the frame into a seed for the deterministic stream generator, so
all structured outputs (rejection sampling, shuffles, unranking) are
reproducible from the payload alone under fixed parameters.

Tags: 0x01 message hash, 0x02 invertible-element hash, 0x03 sparse-signed
hash, 0x04 plus/minus-one hash, 0x05 fixed-weight hash.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

from .errors import InternalError, InvalidParams
from .params import ParamsInt, ParamsRing
from .ring import RingElement, get_context, is_invertible
from .rng import XofRng

TAG_MESSAGE = 0x01
TAG_INVERTIBLE = 0x02
TAG_SPARSE = 0x03
TAG_PM_ONE = 0x04
TAG_WEIGHTED = 0x05

H1_RETRY_CAP = 1000

# Fixed public pad prepended to integer-scheme message hashes, standing in
# for the lengthening salt of the padded construction.
ZERO_SALT = bytes(32)

_FRAME_PREFIX = b"pkeet-hash-v1"


def _hash_stream(tag: int, params, payload: bytes, counter: int | None = None) -> XofRng:
    frame = bytearray()
    frame.append(tag)
    frame += params.digest()
    if counter is not None:
        frame += counter.to_bytes(8, "little")
    frame += payload
    seed = hashlib.shake_256(_FRAME_PREFIX + bytes(frame)).digest(32)
    return XofRng(seed)


def _stream_bits(stream: XofRng, count: int) -> np.ndarray:
    raw = np.frombuffer(stream.bytes((count + 7) // 8), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:count].astype(np.int64)


def hash_message(params: ParamsRing | ParamsInt, data: bytes):
    """Hash bytes into the message space.

    Ring parameters give an element of R_2 (0/1 coefficients); integer
    parameters give a 0/1 vector of length ``t_msg`` (salted with the fixed
    public pad).
    """
    if isinstance(params, ParamsRing):
        stream = _hash_stream(TAG_MESSAGE, params, data)
        bits = _stream_bits(stream, params.n)
        return RingElement(bits, get_context(params))
    if isinstance(params, ParamsInt):
        stream = _hash_stream(TAG_MESSAGE, params, ZERO_SALT + data)
        return _stream_bits(stream, params.t_msg)
    raise InvalidParams(f"not a parameter record: {type(params)!r}")


def hash_to_invertible(params: ParamsRing, data: bytes) -> RingElement:
    """Map bytes to an invertible ring element by counter rejection."""
    ctx = get_context(params)
    for counter in range(H1_RETRY_CAP):
        stream = _hash_stream(TAG_INVERTIBLE, params, data, counter)
        cand = RingElement(stream.uniform_mod(params.q, params.n), ctx)
        if is_invertible(cand):
            return cand
    raise InternalError(f"no invertible hash output after {H1_RETRY_CAP} counters")


def hash_to_invertible_calls(params: ParamsRing, data: bytes) -> int:
    """Number of rejection rounds :func:`hash_to_invertible` uses on ``data``."""
    ctx = get_context(params)
    for counter in range(H1_RETRY_CAP):
        stream = _hash_stream(TAG_INVERTIBLE, params, data, counter)
        cand = RingElement(stream.uniform_mod(params.q, params.n), ctx)
        if is_invertible(cand):
            return counter + 1
    raise InternalError(f"no invertible hash output after {H1_RETRY_CAP} counters")


def hash_to_sparse(params: ParamsRing, data: bytes) -> RingElement:
    """Map bytes to a signed sparse element: exactly ``delta_w`` coefficients
    in {-1, +1}, positions chosen by a stream-driven partial shuffle."""
    n, weight = params.n, params.delta_w
    if not 1 <= weight <= n:
        raise InvalidParams(f"sparse weight {weight} outside [1, {n}]")
    stream = _hash_stream(TAG_SPARSE, params, data)
    idx = np.arange(n)
    for i in range(weight):
        j = i + int(stream.uniform_mod(n - i, 1)[0])
        idx[i], idx[j] = idx[j], idx[i]
    signs = 2 * _stream_bits(stream, weight) - 1
    coeffs = np.zeros(n, dtype=np.int64)
    coeffs[idx[:weight]] = signs
    return RingElement(coeffs, get_context(params))


def hash_pm_one(params: ParamsInt, data: bytes, l: int) -> np.ndarray:
    """Map bytes to a vector in {-1, +1}^l."""
    if l < 1:
        raise InvalidParams("selector length must be positive")
    stream = _hash_stream(TAG_PM_ONE, params, data)
    return 2 * _stream_bits(stream, l) - 1


def hash_weighted(params: ParamsInt, data: bytes, k_sig: int, w_sig: int) -> np.ndarray:
    """Map bytes to a 0/1 vector of length ``k_sig`` with weight exactly
    ``w_sig`` by unranking a stream-uniform combination index."""
    if not 1 <= w_sig <= k_sig:
        raise InvalidParams(f"weight {w_sig} outside [1, {k_sig}]")
    total = math.comb(k_sig, w_sig)
    stream = _hash_stream(TAG_WEIGHTED, params, data)
    nbits = total.bit_length() + 64
    nbytes = (nbits + 7) // 8
    limit = ((1 << (8 * nbytes)) // total) * total
    for _ in range(H1_RETRY_CAP):
        r = int.from_bytes(stream.bytes(nbytes), "little")
        if r < limit:
            rank = r % total
            break
    else:
        raise InternalError("weighted-hash rejection cap exhausted")
    out = np.zeros(k_sig, dtype=np.int64)
    remaining = w_sig
    for i in range(k_sig - 1, -1, -1):
        if remaining == 0:
            break
        skip = math.comb(i, remaining)
        if rank >= skip:
            out[i] = 1
            rank -= skip
            remaining -= 1
    return out
