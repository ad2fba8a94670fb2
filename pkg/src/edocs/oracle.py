"""Brute-force ground truth for the constructions.

The verifiers enumerate every subset the definitions quantify over, so they
are exponential in k. Each one takes a ``budget`` (maximum number of subsets
to visit) and raises :class:`BudgetExceeded` up front rather than running
forever.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import BinaryDesign

DEFAULT_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    pass


def _guard(count: int, budget: int, what: str):
    if count > budget:
        raise BudgetExceeded(f"{what}: {count} subsets exceeds budget {budget}")


def _eps_list_size(eps: float, k: int) -> int:
    return max(1, math.floor(eps * k + 1e-9))


def check_distinguishable(M: BinaryDesign, k: int, l: int, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff every k-subset of columns has private rows for more than k - l of its members.

    A private row of column i (w.r.t. a subset X) is a row whose support meets
    X exactly in {i}.
    """
    if k < 1 or l < 1:
        raise ValueError("need k >= 1 and l >= 1")
    if k > M.cols:
        return True
    _guard(math.comb(M.cols, k), budget, "check_distinguishable")
    masks = M.column_masks()
    need = k - l + 1
    for X in combinations(masks, k):
        found = 0
        for pos, mi in enumerate(X):
            others = 0
            for q, mq in enumerate(X):
                if q != pos:
                    others |= mq
            if mi & ~others:
                found += 1
        if found < need:
            return False
    return True


def check_strongly_distinguishable(M: BinaryDesign, k: int, eps: float,
                                   budget: int = DEFAULT_BUDGET) -> bool:
    """(k', max(1, floor(eps k')))-distinguishable for every k' <= k."""
    total = sum(math.comb(M.cols, kk) for kk in range(1, k + 1))
    _guard(total, budget, "check_strongly_distinguishable")
    return all(check_distinguishable(M, kk, _eps_list_size(eps, kk), budget)
               for kk in range(1, k + 1))


def check_list_uf(M: BinaryDesign, k: int, l: int, alpha: float,
                  budget: int = DEFAULT_BUDGET) -> bool:
    """List union-free test over all disjoint S (|S| = l), T (|T| = k).

    Some j in S must overlap the union of the other chosen columns in fewer
    than alpha * |B_j| rows (|B_j| = d for a constant-weight design).
    """
    if k < 0 or l < 1:
        raise ValueError("need k >= 0 and l >= 1")
    n = M.cols
    if l + k > n:
        return True
    _guard(math.comb(n, l) * math.comb(n - l, k), budget, "check_list_uf")
    masks = M.column_masks()
    limits = [alpha * m.bit_count() for m in masks]
    for S in combinations(range(n), l):
        in_s = set(S)
        rest = [masks[i] for i in range(n) if i not in in_s]
        s_unions = []
        for j in S:
            u = 0
            for i in S:
                if i != j:
                    u |= masks[i]
            s_unions.append((masks[j], u, limits[j]))
        if l == 1:
            bj, _, lim = s_unions[0]
            for T in combinations(rest, k):
                u = 0
                for t in T:
                    u |= t
                if (bj & u).bit_count() >= lim:
                    return False
            continue
        for T in combinations(rest, k):
            u = 0
            for t in T:
                u |= t
            if not any((bj & (u | us)).bit_count() < lim for bj, us, lim in s_unions):
                return False
    return True


def check_strongly_list_uf(M: BinaryDesign, k: int, eps: float, alpha: float,
                           budget: int = DEFAULT_BUDGET) -> bool:
    """(k', max(1, floor(eps k')), alpha)-list UF for every k' <= k."""
    n = M.cols
    total = 0
    for kk in range(1, k + 1):
        ll = _eps_list_size(eps, kk)
        if ll + kk <= n:
            total += math.comb(n, ll) * math.comb(n - ll, kk)
    _guard(total, budget, "check_strongly_list_uf")
    return all(check_list_uf(M, kk, _eps_list_size(eps, kk), alpha, budget)
               for kk in range(1, k + 1))


def exhaustive_gt_decode(B: BinaryDesign, y_gt) -> set:
    """Items none of whose tests is negative (definite-negative elimination)."""
    y = np.asarray(getattr(y_gt, "bits", y_gt), dtype=np.uint8)
    if y.size != B.rows:
        raise ValueError(f"expected {B.rows} test results, got {y.size}")
    neg = y[B.indices] == 0
    col = np.repeat(np.arange(B.cols), B.weights())
    eliminated = np.zeros(B.cols, dtype=bool)
    np.logical_or.at(eliminated, col[neg], True)
    return set(np.flatnonzero(~eliminated).tolist())


@dataclass(frozen=True)
class BibConfig:
    """``balls`` thrown uniformly into ``bins``; a trial is bad when some bin gets > ``threshold``.

    With ``levels`` > 1 each trial repeats the throw independently that many
    times (one per tree level) and is bad when any level is bad.
    """

    balls: int
    bins: int
    threshold: int
    trials: int
    seed: int = 0
    levels: int = 1

    def __post_init__(self):
        if self.balls < 1 or self.bins < 1 or self.trials < 1 or self.levels < 1:
            raise ValueError("balls, bins, trials and levels must be positive")


def bib_simulate(cfg: BibConfig, chunk: int = 4096) -> float:
    rng = np.random.default_rng(cfg.seed)
    remaining = cfg.trials * cfg.levels
    per = max(1, min(chunk, (1 << 22) // cfg.bins))
    flags = []
    while remaining:
        t = min(per, remaining)
        throws = rng.integers(0, cfg.bins, size=(t, cfg.balls))
        flat = (throws + (np.arange(t) * cfg.bins)[:, None]).ravel()
        loads = np.bincount(flat, minlength=t * cfg.bins).reshape(t, cfg.bins)
        flags.append(loads.max(axis=1) > cfg.threshold)
        remaining -= t
    level_bad = np.concatenate(flags).reshape(cfg.trials, cfg.levels)
    bad = int(level_bad.any(axis=1).sum())
    return bad / cfg.trials


def overload_level_bound(k: int, alpha: float, C: int = 16) -> float:
    """Per-level bound (Ck)^(1 - alpha) on some test holding more than k_alpha defectives."""
    return float(C * k) ** (1.0 - alpha)


def overload_tree_bound(n: int, k: int, alpha: float, C: int = 16) -> float:
    """Whole-tree bound log2(n) * (Ck)^(1 - alpha)."""
    return math.log2(n) * overload_level_bound(k, alpha, C)


def splitting_error_bound(n: int, k: int) -> float:
    """Erroneous-output bound e^-k + n^-k + 5 k^-3 for fast binary splitting."""
    return math.exp(-k) + float(n) ** (-k) + 5.0 * k ** -3


def verdict_record(design: BinaryDesign, prop: str, params: dict, verdict: bool) -> str:
    return json.dumps({"design": design.fingerprint(), "property": prop,
                       "params": params, "verdict": bool(verdict)}, sort_keys=True)
