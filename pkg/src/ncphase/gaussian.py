"""Finite-dimensional Gaussian partition functions and Wick contractions.

Euclidean weight exp(-chi^+ h chi + J^+ chi + chi^+ J), normalized so that
Z(h = I, J = 0) = 1.  Bose variables are complex numbers, fermi variables
Grassmann; ``<chi_i chi^+_j> = (h^-1)_ij`` in both cases.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuadraticAction:
    h: np.ndarray
    statistics: str = "bose"

    def __post_init__(self):
        h = np.atleast_2d(np.array(self.h, dtype=complex))
        if h.shape[0] != h.shape[1]:
            raise ValueError("h must be square")
        if self.statistics not in ("bose", "fermi"):
            raise ValueError(f"unknown statistics {self.statistics!r}")
        if np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise ValueError("h is not hermitian")
        w = np.linalg.eigvalsh(h)
        if self.statistics == "bose" and np.min(w) <= 0:
            raise ValueError("bose action needs positive-definite h")
        if np.min(np.abs(w)) == 0:
            raise ValueError("h is singular")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def m(self) -> int:
        return self.h.shape[0]

    def propagator(self) -> np.ndarray:
        return np.linalg.inv(self.h)

    def log_det(self) -> complex:
        sign, logabs = np.linalg.slogdet(self.h)
        return complex(logabs + np.log(complex(sign)))


def log_partition(Qa: QuadraticAction, J: Sequence[complex] | None = None) -> complex:
    """bose: -log det h + J^+ h^-1 J;  fermi: log det h - J^+ h^-1 J."""
    J = np.zeros(Qa.m, complex) if J is None else np.asarray(J, dtype=complex).reshape(Qa.m)
    source = complex(J.conj() @ np.linalg.solve(Qa.h, J))
    if Qa.statistics == "bose":
        return -Qa.log_det() + source
    return Qa.log_det() - source


def _perm_sign(order: Sequence[int]) -> int:
    order = list(order)
    inv = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    return -1 if inv % 2 else 1


def green(Qa: QuadraticAction, insertions: Sequence[tuple[bool, int]]) -> complex:
    """Wick sum for <prod chi / chi^+> in the given order.

    ``insertions`` lists ``(conjugated, mode)``.  Fermi pairings carry the sign of
    the permutation that brings each chi next to (and left of) its partner.
    """
    ins = [(bool(c), int(k)) for c, k in insertions]
    if len(ins) % 2:
        log.info("odd correlator: %d insertions, value is exactly 0", len(ins))
        return 0j
    plain = [pos for pos, (c, _) in enumerate(ins) if not c]
    conj = [pos for pos, (c, _) in enumerate(ins) if c]
    if len(plain) != len(conj):
        log.info("unbalanced correlator: %d chi vs %d chi^+, value is exactly 0", len(plain), len(conj))
        return 0j
    for _, k in ins:
        if not 0 <= k < Qa.m:
            raise IndexError(f"mode {k} outside 0..{Qa.m - 1}")
    G = Qa.propagator()
    fermi = Qa.statistics == "fermi"
    total = 0j
    for perm in itertools.permutations(conj):
        term = 1 + 0j
        for p, q in zip(plain, perm):
            term *= G[ins[p][1], ins[q][1]]
        if fermi:
            term *= _perm_sign([pos for pair in zip(plain, perm) for pos in pair])
        total += term
    return total


def vacuum_ratio(Qa: QuadraticAction, alpha, beta, gamma, delta) -> complex:
    """Z of the action after chi -> alpha chi + beta chi^+ (and gamma, delta for chi^+), over Z.

    Evaluated on the doubled vector (chi, chi^+): the form becomes
    M^+ diag(h, h^T) M, and Z scales as det^(-1/2) (bose) or det^(+1/2) (fermi).
    """
    A, B, G, D = (np.atleast_2d(np.asarray(x, complex)) for x in (alpha, beta, gamma, delta))
    M = np.block([[A, B], [G, D]])
    K = np.block([[Qa.h, np.zeros_like(Qa.h)], [np.zeros_like(Qa.h), Qa.h.T]])
    sign = -0.5 if Qa.statistics == "bose" else 0.5
    _, ld_new = np.linalg.slogdet(M.conj().T @ K @ M)
    _, ld_old = np.linalg.slogdet(K)
    return complex(np.exp(sign * (ld_new - ld_old)))
