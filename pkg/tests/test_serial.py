"""Framed binary serialization: bijectivity, integrity, params binding."""

import numpy as np
import pytest

from pkeet import pkeet_int as pi
from pkeet import pkeet_ring as pr
from pkeet import serial
from pkeet.errors import FramingError, ParamsMismatch
from pkeet.ring import encode_message, get_context
from conftest import seeded


@pytest.fixture(scope="module")
def ring_objects(ring_small):
    rng = seeded("serial-ring")
    pk, sk = pr.setup(ring_small, rng)
    msg = encode_message(rng.uniform_mod(2, ring_small.n), get_context(ring_small))
    ct = pr.encrypt(pk, msg, ring_small, rng)
    td = pr.trapdoor(sk, pk)
    return {"params": ring_small, "msg": msg,
            serial.KIND_PK: pk, serial.KIND_SK: sk,
            serial.KIND_CT: ct, serial.KIND_TD: td}


@pytest.fixture(scope="module")
def int_objects(int_small):
    rng = seeded("serial-int")
    pk, sk = pi.setup_int(int_small, rng)
    msg = rng.uniform_mod(2, int_small.t_msg)
    ct = pi.encrypt_int(pk, msg, int_small, rng)
    td = pi.trapdoor_int(sk, pk)
    return {"params": int_small, "msg": msg,
            serial.KIND_PK: pk, serial.KIND_SK: sk,
            serial.KIND_CT: ct, serial.KIND_TD: td}


KINDS = (serial.KIND_PK, serial.KIND_SK, serial.KIND_CT, serial.KIND_TD)


def test_ring_frames_are_bijective(ring_objects):
    params = ring_objects["params"]
    for kind in KINDS:
        blob = serial.encode_object(serial.SCHEME_RING, kind, ring_objects[kind], params)
        scheme2, kind2, params2, obj = serial.decode_object(blob, expect_kind=kind)
        assert (scheme2, kind2) == (serial.SCHEME_RING, kind)
        assert params2.canonical_text() == params.canonical_text()
        assert serial.encode_object(serial.SCHEME_RING, kind, obj, params2) == blob


def test_int_frames_are_bijective(int_objects):
    params = int_objects["params"]
    for kind in KINDS:
        blob = serial.encode_object(serial.SCHEME_INT, kind, int_objects[kind], params)
        _, _, params2, obj = serial.decode_object(blob, expect_kind=kind)
        assert serial.encode_object(serial.SCHEME_INT, kind, obj, params2) == blob


def test_decoded_ring_objects_still_work(ring_objects):
    params = ring_objects["params"]
    rng = seeded("serial-ring-use")

    def cycle(kind, obj):
        blob = serial.encode_object(serial.SCHEME_RING, kind, obj, params)
        return serial.decode_object(blob, expect_kind=kind)[3]

    pk = cycle(serial.KIND_PK, ring_objects[serial.KIND_PK])
    sk = cycle(serial.KIND_SK, ring_objects[serial.KIND_SK])
    ct = cycle(serial.KIND_CT, ring_objects[serial.KIND_CT])
    td = cycle(serial.KIND_TD, ring_objects[serial.KIND_TD])
    assert pr.decrypt(pk, sk, ct, params, rng) == ring_objects["msg"]
    assert pr.test(td, td, ct, ring_objects[serial.KIND_CT], params, rng) == 1


def test_decoded_int_objects_still_work(int_objects):
    params = int_objects["params"]
    rng = seeded("serial-int-use")

    def cycle(kind, obj):
        blob = serial.encode_object(serial.SCHEME_INT, kind, obj, params)
        return serial.decode_object(blob, expect_kind=kind)[3]

    pk = cycle(serial.KIND_PK, int_objects[serial.KIND_PK])
    sk = cycle(serial.KIND_SK, int_objects[serial.KIND_SK])
    ct = cycle(serial.KIND_CT, int_objects[serial.KIND_CT])
    assert np.array_equal(
        pi.decrypt_int(pk, sk, ct, params, rng), int_objects["msg"]
    )


def test_corrupt_frames_rejected(ring_objects):
    params = ring_objects["params"]
    blob = serial.encode_object(
        serial.SCHEME_RING, serial.KIND_PK, ring_objects[serial.KIND_PK], params
    )
    mutations = {
        "magic": b"JUNK" + blob[4:],
        "version": blob[:4] + bytes([blob[4] ^ 0xFF]) + blob[5:],
        "scheme": blob[:5] + bytes([9]) + blob[6:],
        "kind": blob[:6] + bytes([77]) + blob[7:],
        "digest": blob[:7] + bytes([blob[7] ^ 1]) + blob[8:],
        "truncated": blob[:-3],
        "trailing": blob + b"\x00\x01",
        "empty": b"",
        "short-header": blob[:10],
    }
    for label, bad in mutations.items():
        with pytest.raises(FramingError):
            serial.decode_object(bad)


def test_kind_expectation_enforced(ring_objects):
    params = ring_objects["params"]
    blob = serial.encode_object(
        serial.SCHEME_RING, serial.KIND_PK, ring_objects[serial.KIND_PK], params
    )
    with pytest.raises(FramingError):
        serial.decode_object(blob, expect_kind=serial.KIND_CT)


def test_params_text_tamper_rejected(ring_objects):
    params = ring_objects["params"]
    blob = bytearray(
        serial.encode_object(
            serial.SCHEME_RING, serial.KIND_PK, ring_objects[serial.KIND_PK], params
        )
    )
    # The canonical parameter text starts right after the fixed header and
    # the 4-byte text length; flip one character inside it.
    offset = 23 + 4 + 10
    blob[offset] ^= 0x01
    with pytest.raises(FramingError):
        serial.decode_object(bytes(blob))


def test_params_frame_round_trip(ring_objects, int_objects):
    for scheme, objs in (
        (serial.SCHEME_RING, ring_objects),
        (serial.SCHEME_INT, int_objects),
    ):
        params = objs["params"]
        blob = serial.encode_object(scheme, serial.KIND_PARAMS, None, params)
        _, _, decoded, _ = serial.decode_object(blob, expect_kind=serial.KIND_PARAMS)
        assert decoded.canonical_text() == params.canonical_text()


def test_require_same_params(ring_small, ring_toy):
    serial.require_same_params(ring_small, ring_small)
    with pytest.raises(ParamsMismatch):
        serial.require_same_params(ring_small, ring_toy)
