"""Tensor-network contraction over qubit-sized legs.

Every leg has dimension 2, so tensors are flat complex128 arrays of length
2**k whose bit i (most significant first) is addressed by ``legs[i]``.  The
pairwise contraction of two such tensors is the hot kernel of the whole
engine: it runs behind every semantic oracle call.  A compiled Cython kernel
is preferred; a numpy/einsum fallback with the same interface is selected at
import time when the extension is unavailable (or ZXPIVOT_NO_EXT is set).
"""

from __future__ import annotations

import os

import numpy as np

from . import pyfallback

if os.environ.get("ZXPIVOT_NO_EXT"):
    _impl = pyfallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on build environment
        _impl = pyfallback
        BACKEND = "python"

contract_pair = _impl.contract_pair
self_trace = _impl.self_trace


def available_backends() -> dict[str, object]:
    out: dict[str, object] = {"python": pyfallback}
    if BACKEND == "compiled":
        out["compiled"] = _impl
    return out


def contract_network(
    tensors: list[tuple[np.ndarray, list[int]]],
    open_legs: list[int],
    impl=None,
) -> np.ndarray:
    """Contract a closed-or-open network down to one flat tensor.

    ``tensors`` pairs a flat complex array of length 2**len(legs) with its
    leg ids.  Legs not listed in ``open_legs`` must occur exactly twice in
    the network; they are summed over.  The result is returned flat, indexed
    by ``open_legs`` in the given order (length 2**len(open_legs)).
    """
    impl = impl or _impl
    arrays: list[np.ndarray | None] = []
    leg_lists: list[list[int] | None] = []
    for arr, legs in tensors:
        flat = np.ascontiguousarray(arr, dtype=np.complex128).reshape(-1)
        if len(set(legs)) != len(legs):
            flat, legs = impl.self_trace(flat, list(legs))
        arrays.append(np.asarray(flat))
        leg_lists.append(list(legs))

    if hasattr(impl, "contract_many"):
        pieces = impl.contract_many(arrays, leg_lists)
    else:
        pieces = _greedy_contract(arrays, leg_lists, impl)

    total = np.ones(1, dtype=np.complex128)
    total_legs: list[int] = []
    for arr, legs in pieces:
        total = np.multiply.outer(total, np.asarray(arr)).reshape(-1)
        total_legs.extend(legs)

    if set(total_legs) != set(open_legs):
        raise ValueError("network legs do not match the requested open legs")
    k = len(open_legs)
    if k == 0:
        return total
    perm = [total_legs.index(leg) for leg in open_legs]
    return np.ascontiguousarray(
        total.reshape([2] * k).transpose(perm)
    ).reshape(-1)


def _greedy_contract(arrays, leg_lists, impl):
    """Reference driver: repeatedly contract the connected pair whose
    result has the smallest rank.  The compiled backend fuses this loop."""
    arrays = list(arrays)
    leg_lists = [list(l) for l in leg_lists]
    while True:
        owner: dict[int, int] = {}
        shared: dict[tuple[int, int], int] = {}
        for i, legs in enumerate(leg_lists):
            if legs is None:
                continue
            for leg in legs:
                j = owner.setdefault(leg, i)
                if j != i:
                    key = (j, i)
                    shared[key] = shared.get(key, 0) + 1
        best = None
        for (i, j), count in shared.items():
            rank = len(leg_lists[i]) + len(leg_lists[j]) - 2 * count
            if best is None or rank < best[0]:
                best = (rank, i, j)
        if best is None:
            break
        _, i, j = best
        c, legs_c = impl.contract_pair(arrays[i], leg_lists[i], arrays[j], leg_lists[j])
        arrays[i] = arrays[j] = None
        leg_lists[i] = leg_lists[j] = None
        arrays.append(np.asarray(c))
        leg_lists.append(list(legs_c))
    return [
        (arr, legs)
        for arr, legs in zip(arrays, leg_lists)
        if arr is not None
    ]
