"""Kernel backend selection.

The scoring arithmetic lives in two interchangeable implementations: a
compiled extension (taas._kernels_c, built with Cython) and a pure-Python
mirror (taas._kernels_py). The compiled one is preferred when importable.

Set TAAS_KERNELS=pure or TAAS_KERNELS=native to force a backend; "native"
raises if the extension is missing instead of silently falling back.
"""

from __future__ import annotations

import os
from types import ModuleType

from taas import _kernels_py

BACKEND_ENV = "TAAS_KERNELS"

_KERNEL_NAMES = (
    "reputation_window",
    "provider_reputation",
    "aggregate_recommendations",
    "similarity_credibility",
    "transaction_factor",
    "community_factor",
    "final_trust",
    "decay_value",
    "reward_value",
    "punish_value",
)


def _load_native() -> ModuleType | None:
    try:
        from taas import _kernels_c
    except ImportError:
        return None
    return _kernels_c


def available_backends() -> dict[str, ModuleType]:
    """All importable backends by name; "pure" is always present."""
    backends: dict[str, ModuleType] = {"pure": _kernels_py}
    native = _load_native()
    if native is not None:
        backends["native"] = native
    return backends


def _select() -> tuple[str, ModuleType]:
    forced = os.environ.get(BACKEND_ENV, "").strip().lower()
    if forced == "pure":
        return "pure", _kernels_py
    native = _load_native()
    if native is not None:
        return "native", native
    if forced == "native":
        raise ImportError(
            "TAAS_KERNELS=native but the compiled extension taas._kernels_c "
            "is not importable; rebuild the package or unset the variable"
        )
    return "pure", _kernels_py


BACKEND, _impl = _select()

reputation_window = _impl.reputation_window
provider_reputation = _impl.provider_reputation
aggregate_recommendations = _impl.aggregate_recommendations
similarity_credibility = _impl.similarity_credibility
transaction_factor = _impl.transaction_factor
community_factor = _impl.community_factor
final_trust = _impl.final_trust
decay_value = _impl.decay_value
reward_value = _impl.reward_value
punish_value = _impl.punish_value

__all__ = ["BACKEND", "BACKEND_ENV", "available_backends", *(_KERNEL_NAMES)]
