"""Brute-force contraction of translation-invariant chains into dense vectors."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from .linalg import check_budget

Array = NDArray[np.complex128]


def mps_products(tensors: Array, n_sites: int) -> Array:
    """All products ``A[i1] @ ... @ A[iN]``, shape ``(d**N, D, D)``."""
    d, dim, _ = tensors.shape
    prod = tensors.copy()
    for _ in range(n_sites - 1):
        prod = np.einsum("pab,ibc->piac", prod, tensors).reshape(-1, dim, dim)
    return prod


def split_products(table: Array, n_sites: int) -> Array:
    """All products ``T[i1,i2] @ T[i2,i3] @ ... @ T[i_{N-1},iN]``.

    ``table`` has shape ``(d, d, chi, chi)``. The result has shape
    ``(d**N, chi, chi)`` with configurations in lexicographic order.
    """
    d, _, chi, _ = table.shape
    prod = np.broadcast_to(np.eye(chi, dtype=np.complex128), (d, chi, chi))
    prod = prod.reshape(1, d, chi, chi)
    for _ in range(n_sites - 1):
        prod = np.einsum("pkab,kqbc->pkqac", prod, table).reshape(-1, d, chi, chi)
    return prod.reshape(-1, chi, chi)


def mps_pbc(tensors: Array, n_sites: int) -> Array:
    d, dim, _ = tensors.shape
    check_budget(d**n_sites)
    out = np.zeros(d**n_sites, dtype=np.complex128)
    # one boundary index at a time keeps memory at d**N * D
    for a in range(dim):
        row = tensors[:, a : a + 1, :]
        for _ in range(n_sites - 1):
            row = np.einsum("pab,ibc->piac", row, tensors).reshape(-1, 1, dim)
        out += row[:, 0, a]
    return out


def mps_obc(tensors: Array, n_sites: int) -> Array:
    """Amplitudes ``<a|A[i1]...A[iN]|b>`` ordered as ``(a, i1, ..., iN, b)``."""
    d, dim, _ = tensors.shape
    check_budget(dim * dim * d**n_sites)
    prod = mps_products(tensors, n_sites)
    return np.transpose(prod, (1, 0, 2)).reshape(-1)


def split_pbc(table: Array, n_sites: int, twist: Array | None = None) -> Array:
    """Cyclic traces ``Tr(V @ T[i1,i2] @ ... @ T[iN,i1])`` for all configurations.

    ``twist`` is either one ``(chi, chi)`` matrix or a stack ``(d, chi, chi)``
    indexed by the first physical value ``i1``.
    """
    d, _, chi, _ = table.shape
    check_budget(d**n_sites)
    prod = split_products(table, n_sites).reshape(d, -1, d, chi, chi)
    if twist is not None:
        if twist.ndim == 2:
            prod = np.einsum("ab,fmlbc->fmlac", twist, prod)
        else:
            prod = np.einsum("fab,fmlbc->fmlac", twist, prod)
    return np.einsum("fmlab,lfba->fml", prod, table).reshape(-1)


def split_obc(table: Array, n_sites: int) -> Array:
    d, _, chi, _ = table.shape
    check_budget(chi * chi * d**n_sites)
    prod = split_products(table, n_sites)
    return np.transpose(prod, (1, 0, 2)).reshape(-1)
