import itertools

import pytest

import habpy


@pytest.fixture(scope="module")
def authority():
    return habpy.setup(80)


def test_levels():
    assert habpy.supported_levels() == [80, 112, 128]


def test_abe_roundtrip(authority):
    pp, msk = authority
    key = habpy.keygen(pp, msk, ["doctor", "cardiology"])
    doc = habpy.encrypt(pp, "doctor AND cardiology", b"<record>bp 120/80</record>")
    assert habpy.decrypt(pp, key, doc) == b"<record>bp 120/80</record>"


def test_abe_denies_unsatisfied(authority):
    pp, msk = authority
    key = habpy.keygen(pp, msk, ["nurse"])
    doc = habpy.encrypt(pp, "doctor AND cardiology", b"x")
    with pytest.raises(habpy.HabError, match="NotSatisfied"):
        habpy.decrypt(pp, key, doc)


def test_policy_helpers():
    assert habpy.normalize_policy("a and b or c") == "((a AND b) OR c)"
    assert habpy.satisfies("THRESHOLD(2, a, b, c)", ["a", "c"])
    assert not habpy.satisfies("a AND b", ["a"])
    with pytest.raises(habpy.HabError):
        habpy.normalize_policy("")


def test_split_combine_subsets():
    data = bytes(range(256)) * 4
    shares = habpy.split(data, 5, 3)
    for subset in itertools.combinations(shares, 3):
        assert habpy.combine(list(subset), 3) == data
    with pytest.raises(habpy.HabError):
        habpy.combine(shares[:2], 3)


def test_partition_is_stable():
    assert habpy.partition_of("user-1", 4) == habpy.partition_of("user-1", 4)
    assert 0 <= habpy.partition_of("user-1", 4) < 4


def test_verify_chain_empty():
    assert habpy.verify_chain([])["intact"]
