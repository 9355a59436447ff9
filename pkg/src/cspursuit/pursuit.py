"""Greedy chunk-sparse recovery with prior support information.

The modified pursuit forces the s_c most promising prior chunks into every
merge and refinement step. The conservative variant trusts the prior only
in the merge and re-selects the final support over all chunks, so an
overstated s_c cannot lock wrong chunks into the estimate.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (ChunkIndexing, ChunkSupport, as_matrix, chunk_norms,
                   frobenius, ls_solve_with_rank, submatrix_by_chunks,
                   top_k_chunks)
from .errors import DimensionError, SelectionError
from .sparsity import ChunkSparseMatrix, PriorSupportInfo, validate_prior

__all__ = [
    "StopReason",
    "PursuitConfig",
    "RecoveryResult",
    "msp_support_merge",
    "msp_support_refine",
    "msp_recover",
    "cmsp_support_merge",
    "cmsp_support_refine",
    "cmsp_recover",
    "sp_recover",
    "mmv_sp_recover",
    "genie_ls",
]


class StopReason(enum.Enum):
    THRESHOLD_MET = "ThresholdMet"
    RESIDUE_NON_DECREASING = "ResidueNonDecreasing"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class PursuitConfig:
    """Shared knobs for the pursuit algorithms.

    s_bar is the sparsity budget (final supports have exactly s_bar
    chunks), gamma the residue-norm stopping threshold, d the chunk height.
    """

    s_bar: int
    prior: PriorSupportInfo
    gamma: float
    d: int = 1
    max_iter: int = 100

    def __post_init__(self) -> None:
        if self.s_bar < 1:
            raise ValueError(f"s_bar must be positive, got {self.s_bar}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be positive, got {self.max_iter}")


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    """Output of a pursuit run.

    residue_norms[0] is ||Y||_F; one entry is appended per executed
    iteration, so len(residue_norms) == iterations + 1 even when the
    returned iterate is the previous one. rank_deficient_ls is sticky over
    every least-squares solve in the run.
    """

    X_hat: ChunkSparseMatrix
    T_hat: ChunkSupport
    residue_norms: tuple[float, ...]
    iterations: int
    stop_reason: StopReason
    rank_deficient_ls: bool


def _correlation_scores(R, Phi, idx: ChunkIndexing) -> np.ndarray:
    # chunk norms of Phi^H R
    return chunk_norms(Phi.conj().T @ R, idx)


def _universe(K: int) -> tuple[int, ...]:
    return tuple(range(1, K + 1))


def _merge_context(R, Phi, T_hat, cfg: PursuitConfig) -> tuple[np.ndarray, ChunkIndexing]:
    R = as_matrix(R, "R")
    Phi = as_matrix(Phi, "Phi")
    if R.shape[0] != Phi.shape[0]:
        raise DimensionError(f"R has {R.shape[0]} rows, Phi has {Phi.shape[0]}")
    if Phi.shape[1] % cfg.d:
        raise DimensionError(
            f"Phi has {Phi.shape[1]} columns, not a multiple of d={cfg.d}")
    K = Phi.shape[1] // cfg.d
    idx = ChunkIndexing(K, cfg.d)
    if T_hat.K != K:
        raise DimensionError(f"running support universe {T_hat.K} != {K}")
    if len(cfg.prior.T0) and cfg.prior.T0.K != K:
        raise DimensionError(f"prior universe {cfg.prior.T0.K} != {K}")
    return _correlation_scores(R, Phi, idx), idx


def msp_support_merge(R, Phi, T_hat: ChunkSupport, cfg: PursuitConfig) -> ChunkSupport:
    """Merge step: running support, plus the s_c best-correlated prior
    chunks, plus the s_bar - s_c best chunks outside that pick."""
    scores, idx = _merge_context(R, Phi, T_hat, cfg)
    s_c = cfg.prior.s_c
    t_b = top_k_chunks(scores, s_c, cfg.prior.T0.indices)
    rest = tuple(k for k in _universe(idx.K) if k not in set(t_b))
    t_c = top_k_chunks(scores, cfg.s_bar - s_c, rest)
    return ChunkSupport.of(T_hat.as_set() | set(t_b) | set(t_c), idx.K)


def msp_support_refine(Z: ChunkSparseMatrix, cfg: PursuitConfig) -> ChunkSupport:
    """Refinement: keep the s_c strongest chunks inside the prior, then the
    s_bar - s_c strongest among everything not already kept."""
    norms = Z.norms()
    part1 = top_k_chunks(norms, cfg.prior.s_c, cfg.prior.T0.indices)
    rest = tuple(k for k in _universe(Z.idx.K) if k not in set(part1))
    part2 = top_k_chunks(norms, cfg.s_bar - cfg.prior.s_c, rest)
    return ChunkSupport.of(set(part1) | set(part2), Z.idx.K)


def cmsp_support_merge(R, Phi, T_hat: ChunkSupport, cfg: PursuitConfig) -> ChunkSupport:
    """Conservative merge: top up the prior contribution only by the
    shortfall s_c - |T_hat ∩ T0|, then add the s_bar best chunks overall."""
    scores, idx = _merge_context(R, Phi, T_hat, cfg)
    overlap = len(T_hat.as_set() & cfg.prior.T0.as_set())
    shortfall = cfg.prior.s_c - overlap
    if shortfall > 0:
        pool = tuple(k for k in cfg.prior.T0 if k not in T_hat)
        t_b = top_k_chunks(scores, shortfall, pool)
    else:
        t_b = ()
    t_c = top_k_chunks(scores, cfg.s_bar, _universe(idx.K))
    return ChunkSupport.of(T_hat.as_set() | set(t_b) | set(t_c), idx.K)


def cmsp_support_refine(Z: ChunkSparseMatrix, cfg: PursuitConfig) -> ChunkSupport:
    """Conservative refinement: the s_bar strongest chunks, prior ignored."""
    norms = Z.norms()
    return ChunkSupport.of(top_k_chunks(norms, cfg.s_bar, _universe(Z.idx.K)),
                           Z.idx.K)


def _embedded_ls(Y, Phi, T: ChunkSupport, idx: ChunkIndexing) -> tuple[np.ndarray, np.ndarray, bool]:
    """Least squares on the chunks of T, re-embedded into full height.

    Returns (full-height solution, fitted Phi_[T] @ coefficients, rank flag).
    """
    sub = submatrix_by_chunks(Phi, T, idx)
    sol, deficient = ls_solve_with_rank(sub, Y)
    data = np.zeros((idx.total_rows, Y.shape[1]), dtype=np.complex128)
    if len(T):
        data[idx.rows_of(T)] = sol
    return data, sub @ sol, deficient


MergeFn = Callable[[np.ndarray, np.ndarray, ChunkSupport, PursuitConfig], ChunkSupport]
RefineFn = Callable[[ChunkSparseMatrix, PursuitConfig], ChunkSupport]


def _run_pursuit(Y, Phi, cfg: PursuitConfig, merge: MergeFn,
                 refine: RefineFn) -> RecoveryResult:
    Y = as_matrix(Y, "Y")
    Phi = as_matrix(Phi, "Phi")
    if Y.shape[0] != Phi.shape[0]:
        raise DimensionError(f"Y has {Y.shape[0]} rows, Phi has {Phi.shape[0]}")
    if Phi.shape[1] % cfg.d:
        raise DimensionError(
            f"Phi has {Phi.shape[1]} columns, not a multiple of d={cfg.d}")
    K = Phi.shape[1] // cfg.d
    if cfg.s_bar > K:
        raise SelectionError(f"s_bar={cfg.s_bar} exceeds K={K}")
    validate_prior(cfg.prior, cfg.s_bar)
    if len(cfg.prior.T0) and cfg.prior.T0.K != K:
        raise DimensionError(f"prior universe {cfg.prior.T0.K} != K={K}")
    idx = ChunkIndexing(K, cfg.d)

    T_prev = ChunkSupport.empty(K)
    X_prev = np.zeros((idx.total_rows, Y.shape[1]), dtype=np.complex128)
    R_prev = Y
    r_prev = frobenius(Y)
    trace = [r_prev]
    deficient = False

    for it in range(1, cfg.max_iter + 1):
        T_a = merge(R_prev, Phi, T_prev, cfg)
        Z_data, _, d1 = _embedded_ls(Y, Phi, T_a, idx)
        T_next = refine(ChunkSparseMatrix(Z_data, idx), cfg)
        X_next, fitted, d2 = _embedded_ls(Y, Phi, T_next, idx)
        deficient = deficient or d1 or d2
        R_next = Y - fitted
        r_next = frobenius(R_next)
        trace.append(r_next)
        if r_next <= cfg.gamma:
            return RecoveryResult(ChunkSparseMatrix(X_next, idx), T_next,
                                  tuple(trace), it, StopReason.THRESHOLD_MET,
                                  deficient)
        if r_next >= r_prev:
            return RecoveryResult(ChunkSparseMatrix(X_prev, idx), T_prev,
                                  tuple(trace), it,
                                  StopReason.RESIDUE_NON_DECREASING, deficient)
        T_prev, X_prev, R_prev, r_prev = T_next, X_next, R_next, r_next

    # residues decreased strictly on every continuation, so the last iterate
    # is the minimum-residue one
    return RecoveryResult(ChunkSparseMatrix(X_prev, idx), T_prev, tuple(trace),
                          cfg.max_iter, StopReason.MAX_ITERATIONS, deficient)


def msp_recover(Y, Phi, cfg: PursuitConfig) -> RecoveryResult:
    """Recover a chunk-sparse X from Y = Phi X + N using the prior-forcing
    pursuit."""
    return _run_pursuit(Y, Phi, cfg, msp_support_merge, msp_support_refine)


def cmsp_recover(Y, Phi, cfg: PursuitConfig) -> RecoveryResult:
    """Recover X with the conservative variant (prior used for candidates
    only, never locked into the output support)."""
    return _run_pursuit(Y, Phi, cfg, cmsp_support_merge, cmsp_support_refine)


def sp_recover(Y, Phi, s_bar: int, gamma: float, max_iter: int = 100) -> RecoveryResult:
    """Conventional subspace pursuit: no prior, scalar chunks (d=1)."""
    K = as_matrix(Phi, "Phi").shape[1]
    cfg = PursuitConfig(s_bar=s_bar, prior=PriorSupportInfo.empty(K),
                        gamma=gamma, d=1, max_iter=max_iter)
    return msp_recover(Y, Phi, cfg)


def mmv_sp_recover(Y, Phi, s_bar: int, gamma: float, d: int = 1,
                   max_iter: int = 100) -> RecoveryResult:
    """Joint-recovery subspace pursuit: no prior, chunk structure kept."""
    Phi = as_matrix(Phi, "Phi")
    if Phi.shape[1] % d:
        raise DimensionError(
            f"Phi has {Phi.shape[1]} columns, not a multiple of d={d}")
    K = Phi.shape[1] // d
    cfg = PursuitConfig(s_bar=s_bar, prior=PriorSupportInfo.empty(K),
                        gamma=gamma, d=d, max_iter=max_iter)
    return msp_recover(Y, Phi, cfg)


def genie_ls(Y, Phi, T_true: ChunkSupport, d: int = 1) -> ChunkSparseMatrix:
    """Least squares on the true support (oracle baseline)."""
    Y = as_matrix(Y, "Y")
    Phi = as_matrix(Phi, "Phi")
    if Y.shape[0] != Phi.shape[0]:
        raise DimensionError(f"Y has {Y.shape[0]} rows, Phi has {Phi.shape[0]}")
    if Phi.shape[1] % d:
        raise DimensionError(
            f"Phi has {Phi.shape[1]} columns, not a multiple of d={d}")
    idx = ChunkIndexing(Phi.shape[1] // d, d)
    data, _, _ = _embedded_ls(Y, Phi, T_true, idx)
    return ChunkSparseMatrix(data, idx)
