"""Kernel backend selection.

The compiled extension (``tacticforge._ckernels``) is preferred; the
pure NumPy implementation is the fallback.  Set ``TACTIC_FORGE_KERNELS``
to ``pure`` or ``compiled`` to force a backend.
"""

from __future__ import annotations

import os

from tacticforge.kernels import pure as _pure

_forced = os.environ.get("TACTIC_FORGE_KERNELS", "").strip().lower()

if _forced == "pure":
    _impl = _pure
    BACKEND = "pure"
else:
    try:
        from tacticforge import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise
        _impl = _pure
        BACKEND = "pure"

COSINE = _impl.COSINE
EUCLID_SIM = _impl.EUCLID_SIM
JACCARD = _impl.JACCARD
WEIGHTED_JACCARD = _impl.WEIGHTED_JACCARD

minhash_signature = _impl.minhash_signature
score_batch = _impl.score_batch
