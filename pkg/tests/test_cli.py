"""Command-line interface: pipelines, hex handling, exit-code contract.

Exit codes: 0 success (or EQUAL), 1 equality-test mismatch or decryption
rejection, 2 malformed input of any kind.
"""

import numpy as np
import pytest

from pkeet.cli import main
from conftest import seeded

SEED_A = "aa" * 32
SEED_B = "bb" * 32


@pytest.fixture(scope="module")
def ring_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("ring-cli")
    assert main(["keygen", "--scheme", "ring", "--n", "64", "--seed", SEED_A,
                 "--out-dir", str(d), "--name", "alice"]) == 0
    assert main(["keygen", "--scheme", "ring", "--n", "64", "--seed", SEED_B,
                 "--out-dir", str(d), "--name", "bob"]) == 0
    return d


def test_round_trip_pipeline(ring_files, capsys):
    d = ring_files
    msg = "0badf00d"   # 32 bits, capacity is 64 bits at n=64
    assert main(["encrypt", "--pk", f"{d}/alice.pk", "--message", msg,
                 "--seed", SEED_A, "--out", f"{d}/ct"]) == 0
    capsys.readouterr()
    assert main(["decrypt", "--pk", f"{d}/alice.pk", "--sk", f"{d}/alice.sk",
                 "--ct", f"{d}/ct"]) == 0
    out = capsys.readouterr().out.strip()
    assert out == msg.rjust(16, "0")


def test_equality_pipeline(ring_files, capsys):
    d = ring_files
    for name, seed, message in (
        ("ct-a", SEED_A, "1234"), ("ct-b", SEED_B, "1234"), ("ct-c", SEED_B, "9999")
    ):
        pk = f"{d}/alice.pk" if name == "ct-a" else f"{d}/bob.pk"
        assert main(["encrypt", "--pk", pk, "--message", message,
                     "--seed", seed, "--out", f"{d}/{name}"]) == 0
    assert main(["trapdoor", "--sk", f"{d}/alice.sk", "--pk", f"{d}/alice.pk",
                 "--out", f"{d}/alice.td"]) == 0
    assert main(["trapdoor", "--sk", f"{d}/bob.sk", "--pk", f"{d}/bob.pk",
                 "--out", f"{d}/bob.td"]) == 0
    capsys.readouterr()
    rc = main(["test", "--td-i", f"{d}/alice.td", "--td-j", f"{d}/bob.td",
               "--ct-i", f"{d}/ct-a", "--ct-j", f"{d}/ct-b"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "EQUAL"
    rc = main(["test", "--td-i", f"{d}/alice.td", "--td-j", f"{d}/bob.td",
               "--ct-i", f"{d}/ct-a", "--ct-j", f"{d}/ct-c"])
    assert rc == 1
    assert capsys.readouterr().out.strip() == "NOT-EQUAL"


def test_tampered_ciphertext_exits_one(ring_files, capsys):
    d = ring_files
    assert main(["encrypt", "--pk", f"{d}/alice.pk", "--message", "77",
                 "--seed", SEED_A, "--out", f"{d}/ct-t"]) == 0
    blob = bytearray((d / "ct-t").read_bytes())
    blob[-9] ^= 0x04
    (d / "ct-bad").write_bytes(bytes(blob))
    capsys.readouterr()
    rc = main(["decrypt", "--pk", f"{d}/alice.pk", "--sk", f"{d}/alice.sk",
               "--ct", f"{d}/ct-bad"])
    assert rc == 1
    err = capsys.readouterr().err
    assert "reject" in err.lower()


def test_malformed_inputs_exit_two(ring_files, tmp_path, capsys):
    d = ring_files
    garbage = tmp_path / "garbage"
    garbage.write_bytes(b"definitely not a frame")
    cases = [
        ["decrypt", "--pk", f"{d}/alice.pk", "--sk", f"{d}/alice.sk", "--ct", str(garbage)],
        ["decrypt", "--pk", f"{d}/alice.pk", "--sk", f"{d}/alice.sk", "--ct", str(tmp_path / "missing")],
        ["decrypt", "--pk", f"{d}/alice.pk", "--sk", f"{d}/alice.pk", "--ct", f"{d}/ct-a"],
        ["encrypt", "--pk", f"{d}/alice.pk", "--message", "xyz", "--seed", SEED_A, "--out", str(tmp_path / "o")],
        ["encrypt", "--pk", f"{d}/alice.pk", "--message", "abc", "--seed", SEED_A, "--out", str(tmp_path / "o")],
        ["encrypt", "--pk", f"{d}/alice.pk", "--message", "ff" * 9, "--seed", SEED_A, "--out", str(tmp_path / "o")],
        ["keygen", "--scheme", "ring", "--n", "64", "--seed", "nothex",
         "--out-dir", str(tmp_path), "--name", "x"],
        ["keygen", "--scheme", "ring", "--n", "60", "--seed", SEED_A,
         "--out-dir", str(tmp_path), "--name", "x"],
    ]
    for argv in cases:
        assert main(argv) == 2, f"expected exit 2 for {argv}"
    capsys.readouterr()


def test_cross_parameter_files_exit_two(ring_files, tmp_path, capsys):
    d = ring_files
    assert main(["keygen", "--scheme", "ring", "--n", "128", "--seed", SEED_A,
                 "--out-dir", str(tmp_path), "--name", "wide"]) == 0
    assert main(["encrypt", "--pk", f"{d}/alice.pk", "--message", "55",
                 "--seed", SEED_A, "--out", f"{d}/ct-x"]) == 0
    capsys.readouterr()
    rc = main(["decrypt", "--pk", str(tmp_path / "wide.pk"),
               "--sk", str(tmp_path / "wide.sk"), "--ct", f"{d}/ct-x"])
    assert rc == 2


def test_seeded_runs_reproduce_files(tmp_path, capsys):
    for sub in ("r1", "r2"):
        assert main(["keygen", "--scheme", "ring", "--n", "64", "--seed", SEED_B,
                     "--out-dir", str(tmp_path / sub), "--name", "k"]) == 0
    capsys.readouterr()
    assert (tmp_path / "r1" / "k.pk").read_bytes() == (tmp_path / "r2" / "k.pk").read_bytes()
    assert (tmp_path / "r1" / "k.sk").read_bytes() == (tmp_path / "r2" / "k.sk").read_bytes()


def test_unseeded_runs_differ(tmp_path, capsys):
    for sub in ("f1", "f2"):
        assert main(["keygen", "--scheme", "ring", "--n", "64",
                     "--out-dir", str(tmp_path / sub), "--name", "k"]) == 0
    capsys.readouterr()
    assert (tmp_path / "f1" / "k.pk").read_bytes() != (tmp_path / "f2" / "k.pk").read_bytes()


def test_int_scheme_pipeline(tmp_path, capsys):
    d = tmp_path
    assert main(["keygen", "--scheme", "int", "--n", "16", "--seed", SEED_A,
                 "--out-dir", str(d), "--name", "ivan"]) == 0
    assert main(["encrypt", "--pk", f"{d}/ivan.pk", "--message", "cafe0123",
                 "--seed", SEED_A, "--out", f"{d}/ct"]) == 0
    capsys.readouterr()
    assert main(["decrypt", "--pk", f"{d}/ivan.pk", "--sk", f"{d}/ivan.sk",
                 "--ct", f"{d}/ct"]) == 0
    assert capsys.readouterr().out.strip() == "cafe0123"


def test_message_capacity_is_reported(ring_files, capsys):
    d = ring_files
    rc = main(["encrypt", "--pk", f"{d}/alice.pk", "--message", "ff" * 20,
               "--seed", SEED_A, "--out", "/dev/null"])
    assert rc == 2
    err = capsys.readouterr().err
    assert "64" in err   # capacity in bits appears in the diagnostic
