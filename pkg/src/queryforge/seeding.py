"""Deterministic seed derivation.

A single master seed fans out to per-stage and per-cell seeds by hashing the
master seed together with a path of string labels, so any component of a run
can be reproduced in isolation and results do not depend on execution order.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, *labels: str) -> int:
    """64-bit seed for the stage identified by ``labels`` under ``master``."""
    key = str(master) + "\x1f" + "\x1f".join(labels)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
