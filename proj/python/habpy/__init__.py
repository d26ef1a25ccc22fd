"""Python bindings for the Health Access Broker core library."""

from ._habpy import (
    HabError,
    combine,
    decrypt,
    encrypt,
    keygen,
    normalize_policy,
    partition_of,
    satisfies,
    setup,
    split,
    supported_levels,
    verify_chain,
)

__all__ = [
    "HabError",
    "combine",
    "decrypt",
    "encrypt",
    "keygen",
    "normalize_policy",
    "partition_of",
    "satisfies",
    "setup",
    "split",
    "supported_levels",
    "verify_chain",
]
