"""Trusted timestamps committed to a simulated Bitcoin-like block chain."""

from ._core import (
    Chain,
    ChainstampError,
    aggregate,
    annual_cost,
    attack_success_rate,
    base58check_decode,
    base58check_encode,
    derive_address,
    double_sha256_hex,
    hash160_hex,
    ripemd160_hex,
    sha256_hex,
    verify_bundle,
)

__all__ = [
    "Chain",
    "ChainstampError",
    "aggregate",
    "annual_cost",
    "attack_success_rate",
    "base58check_decode",
    "base58check_encode",
    "derive_address",
    "double_sha256_hex",
    "hash160_hex",
    "ripemd160_hex",
    "sha256_hex",
    "verify_bundle",
]
