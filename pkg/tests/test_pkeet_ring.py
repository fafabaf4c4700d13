"""Ring scheme end to end: round trips, equality tokens, tamper rejection."""

import numpy as np
import pytest

from pkeet import pkeet_ring as pr
from pkeet.errors import InvalidMessage, PkeetError, RejectHash, RejectSignature
from pkeet.ring import RingElement, encode_message, get_context, sample_uniform
from conftest import seeded


@pytest.fixture(scope="module")
def users(ring_small):
    rng = seeded("ring-users")
    alice = pr.setup(ring_small, rng)
    bob = pr.setup(ring_small, rng)
    return alice, bob


def random_message(params, rng):
    return encode_message(rng.uniform_mod(2, params.n), get_context(params))


def test_round_trip(ring_small, users):
    (pk, sk), _ = users
    rng = seeded("ring-roundtrip")
    for _ in range(10):
        msg = random_message(ring_small, rng)
        ct = pr.encrypt(pk, msg, ring_small, rng)
        assert pr.decrypt(pk, sk, ct, ring_small, rng) == msg


def test_encryption_is_randomized(ring_small, users):
    (pk, _), _ = users
    rng = seeded("ring-randomized")
    msg = random_message(ring_small, rng)
    a = pr.encrypt(pk, msg, ring_small, rng)
    b = pr.encrypt(pk, msg, ring_small, rng)
    assert a.ct1 != b.ct1
    assert not np.array_equal(a.sig, b.sig)


def test_non_binary_message_rejected(ring_small, users):
    (pk, _), _ = users
    rng = seeded("ring-badmsg")
    ctx = get_context(ring_small)
    with pytest.raises(InvalidMessage):
        pr.encrypt(pk, sample_uniform(ctx, rng), ring_small, rng)


def test_wrong_recipient_rejects(ring_small, users):
    (pk_a, _), (pk_b, sk_b) = users
    rng = seeded("ring-wrong-sk")
    ct = pr.encrypt(pk_a, random_message(ring_small, rng), ring_small, rng)
    with pytest.raises(PkeetError):
        pr.decrypt(pk_b, sk_b, ct, ring_small, rng)


def test_each_component_tamper_rejects(ring_small, users):
    (pk, sk), _ = users
    rng = seeded("ring-tamper")
    ctx = get_context(ring_small)
    msg = random_message(ring_small, rng)
    ct = pr.encrypt(pk, msg, ring_small, rng)

    def bump(elem):
        c = elem.coeffs.copy()
        c[3] = (c[3] + 1) % ring_small.q
        return RingElement(c, ctx)

    variants = {
        "ct1": pr.CtRing(sig=ct.sig, v=ct.v, ct1=bump(ct.ct1), ct2=ct.ct2, ct3=ct.ct3, ct4=ct.ct4),
        "ct2": pr.CtRing(sig=ct.sig, v=ct.v, ct1=ct.ct1, ct2=bump(ct.ct2), ct3=ct.ct3, ct4=ct.ct4),
    }
    ct3 = ct.ct3.copy(); ct3[0, 0] = (ct3[0, 0] + 1) % ring_small.q
    variants["ct3"] = pr.CtRing(sig=ct.sig, v=ct.v, ct1=ct.ct1, ct2=ct.ct2, ct3=ct3, ct4=ct.ct4)
    ct4 = ct.ct4.copy(); ct4[1, 2] = (ct4[1, 2] + 1) % ring_small.q
    variants["ct4"] = pr.CtRing(sig=ct.sig, v=ct.v, ct1=ct.ct1, ct2=ct.ct2, ct3=ct.ct3, ct4=ct4)
    sig = ct.sig.copy(); sig[0, 0] = (sig[0, 0] + 1) % ring_small.q
    variants["sig"] = pr.CtRing(sig=sig, v=ct.v, ct1=ct.ct1, ct2=ct.ct2, ct3=ct.ct3, ct4=ct.ct4)
    variants["v"] = pr.CtRing(
        sig=ct.sig, v=(bump(ct.v[0]), ct.v[1]),
        ct1=ct.ct1, ct2=ct.ct2, ct3=ct.ct3, ct4=ct.ct4,
    )
    for name, bad in variants.items():
        with pytest.raises((RejectSignature, RejectHash)):
            pr.decrypt(pk, sk, bad, ring_small, rng)


def test_equality_token_truth_table(ring_small, users):
    (pk_a, sk_a), (pk_b, sk_b) = users
    rng = seeded("ring-table")
    td_a = pr.trapdoor(sk_a, pk_a)
    td_b = pr.trapdoor(sk_b, pk_b)
    msg = random_message(ring_small, rng)
    other = random_message(ring_small, rng)
    ct_a = pr.encrypt(pk_a, msg, ring_small, rng)
    ct_b = pr.encrypt(pk_b, msg, ring_small, rng)
    ct_c = pr.encrypt(pk_b, other, ring_small, rng)
    assert pr.test(td_a, td_b, ct_a, ct_b, ring_small, rng) == 1
    assert pr.test(td_a, td_b, ct_a, ct_c, ring_small, rng) == 0
    assert pr.test(td_a, td_a, ct_a, ct_a, ring_small, rng) == 1


def test_token_does_not_expose_message_slot(ring_small, users):
    # The token carries only the hash-slot trapdoor; the message trapdoor
    # object must not travel with it.
    (pk, sk), _ = users
    td = pr.trapdoor(sk, pk)
    assert td.t_b is sk.t_b
    assert td.b.trapdoor is None
    assert not hasattr(td, "t_a")
