"""Pure-numpy contraction kernels (einsum based).

Same contract as the compiled module in ``_core.pyx``; used when the
extension is not built.
"""

from __future__ import annotations

import numpy as np

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _subscript(legs: list[int], table: dict[int, str]) -> str:
    chars = []
    for leg in legs:
        if leg not in table:
            table[leg] = _LETTERS[len(table)]
        chars.append(table[leg])
    return "".join(chars)


def self_trace(a: np.ndarray, legs: list[int]) -> tuple[np.ndarray, list[int]]:
    """Sum over legs repeated within one tensor."""
    if len(set(legs)) == len(legs):
        return a, list(legs)
    if any(legs.count(l) > 2 for l in set(legs)):
        raise ValueError("a leg may occur at most twice in a tensor")
    table: dict[int, str] = {}
    sub = _subscript(legs, table)
    out_legs = [leg for leg in legs if legs.count(leg) == 1]
    out_sub = "".join(table[leg] for leg in out_legs)
    res = np.einsum(f"{sub}->{out_sub}", a.reshape([2] * len(legs)))
    return np.ascontiguousarray(res, dtype=np.complex128).reshape(-1), out_legs


def contract_pair(
    a: np.ndarray, legs_a: list[int], b: np.ndarray, legs_b: list[int]
) -> tuple[np.ndarray, list[int]]:
    """Contract two tensors over all legs they share."""
    shared = set(legs_a) & set(legs_b)
    out_legs = [leg for leg in legs_a if leg not in shared] + [
        leg for leg in legs_b if leg not in shared
    ]
    table: dict[int, str] = {}
    sub_a = _subscript(legs_a, table)
    sub_b = _subscript(legs_b, table)
    out_sub = "".join(table[leg] for leg in out_legs)
    res = np.einsum(
        f"{sub_a},{sub_b}->{out_sub}",
        a.reshape([2] * len(legs_a)),
        b.reshape([2] * len(legs_b)),
    )
    return np.ascontiguousarray(res, dtype=np.complex128).reshape(-1), out_legs
