import json

import pytest

import chainstamp as cs

EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


def test_sha256_known_answer():
    assert cs.sha256_hex(b"") == EMPTY_SHA256
    assert cs.sha256_hex(b"abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_ripemd160_known_answer():
    assert cs.ripemd160_hex(b"abc") == "8eb208f7e05d987a9b044a8e98c6b087f15a0bfc"


def test_base58check_round_trip():
    text = cs.base58check_encode(0, bytes(20))
    assert text == "1111111111111111111114oLvT2"
    assert cs.base58check_decode(text) == (0, bytes(20))
    with pytest.raises(cs.ChainstampError):
        cs.base58check_decode("1111111111111111111114oLvT3")


def test_aggregate_is_order_independent():
    hashes = [cs.sha256_hex(bytes([i])) for i in range(5)]
    assert cs.aggregate(hashes) == cs.aggregate(list(reversed(hashes)))
    assert cs.aggregate(hashes) == cs.aggregate(hashes + hashes[:2])


def test_cost_model_is_exact():
    cost = cs.annual_cost(1, 10000, 365, "250")
    assert cost["satoshi"] == 3650365
    assert cost["btc"] == "730073/20000000"
    assert abs(cost["usd_float"] - 9.1259125) < 1e-9


def test_chain_commit_and_verify(tmp_path):
    digest = cs.sha256_hex(b"document")
    batch = sorted({digest, cs.sha256_hex(b"other")})
    agg = cs.aggregate(batch)
    address = cs.derive_address(agg)
    chain = cs.Chain(8)
    txid = chain.build_transaction(address)
    height, block_hash = chain.mine_block(1_400_000_000)
    for i in range(5):
        chain.mine_block(1_400_000_600 + i)
    assert chain.confirmations(txid) == 6
    assert chain.validate() == (True, None)

    bundle = {
        "format_version": 1,
        "document_hash": digest,
        "batch_hashes": batch,
        "aggregated_hash": agg,
        "address": address,
        "txid": txid,
        "block_hash": block_hash,
        "block_height": height,
        "block_time": "2014-05-13T16:53:20Z",
        "confirmations_at_export": 6,
    }
    report = cs.verify_bundle(digest, json.dumps(bundle), chain)
    assert report["verdict"] == "verified"
    assert report["attested_time"] == chain.block_time(height)

    flipped = cs.sha256_hex(b"documenT")
    assert cs.verify_bundle(flipped, json.dumps(bundle), chain)["verdict"] == "mismatch"

    path = tmp_path / "chain.dat"
    chain.save(str(path))
    reloaded = cs.Chain.load(str(path), 8)
    assert reloaded.tip_height == chain.tip_height
    assert cs.verify_bundle(digest, json.dumps(bundle), reloaded)["verdict"] == "verified"


def test_attack_rate_is_monotone():
    rates = [cs.attack_success_rate(5, q, max_steps=1000, trials=2000, seed=11) for q in (0.1, 0.3, 0.5, 0.7)]
    assert rates == sorted(rates)
    assert rates[0] < 0.01 and rates[-1] > 0.9
