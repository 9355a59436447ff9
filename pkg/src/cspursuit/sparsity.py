"""Chunk-sparse signal model: support types, prior support information,
and random generators for signals and temporally correlated support
sequences.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .core import ChunkIndexing, ChunkSupport, as_matrix, chunk_norms
from .errors import DimensionError, GenerationError, PriorInfoError

__all__ = [
    "ChunkSupport",
    "ChunkSparseMatrix",
    "PriorSupportInfo",
    "SupportEvolutionParams",
    "chunk_support",
    "generate_chunk_sparse",
    "generate_support_sequence",
    "validate_prior",
]


@dataclass(frozen=True, eq=False)
class ChunkSparseMatrix:
    """A K*d x L complex matrix together with its chunk indexing."""

    data: np.ndarray
    idx: ChunkIndexing

    def __post_init__(self) -> None:
        data = as_matrix(self.data, "data")
        if data.shape[0] != self.idx.total_rows:
            raise DimensionError(
                f"data has {data.shape[0]} rows, indexing needs {self.idx.total_rows}")
        object.__setattr__(self, "data", data)

    @property
    def L(self) -> int:
        return self.data.shape[1]

    def norms(self) -> np.ndarray:
        return chunk_norms(self.data, self.idx)

    def support(self, tol: float = 0.0) -> ChunkSupport:
        return chunk_support(self, tol)


@dataclass(frozen=True)
class PriorSupportInfo:
    """A believed support T0 with a guaranteed floor s_c on |T0 ∩ T|."""

    T0: ChunkSupport
    s_c: int

    def __post_init__(self) -> None:
        if self.s_c < 0:
            raise PriorInfoError(f"s_c must be nonnegative, got {self.s_c}")
        if self.s_c > len(self.T0):
            raise PriorInfoError(
                f"s_c <= |T0| violated: s_c={self.s_c}, |T0|={len(self.T0)}")

    @classmethod
    def empty(cls, K: int) -> "PriorSupportInfo":
        """The no-information prior (T0 empty, s_c = 0)."""
        return cls(ChunkSupport.empty(K), 0)


@dataclass(frozen=True)
class SupportEvolutionParams:
    """Parameters of the correlated support sequence generator."""

    s_bar: int
    s_c: int
    K: int

    def __post_init__(self) -> None:
        if self.s_c < 0:
            raise GenerationError(f"s_c must be nonnegative, got {self.s_c}")
        if self.s_c + 2 > self.s_bar:
            raise GenerationError(
                f"s_c + 2 <= s_bar violated: s_c={self.s_c}, s_bar={self.s_bar}")
        if self.s_bar > self.K:
            raise GenerationError(
                f"s_bar <= K violated: s_bar={self.s_bar}, K={self.K}")


def chunk_support(X: ChunkSparseMatrix, tol: float = 0.0) -> ChunkSupport:
    """Indices of chunks with Frobenius norm strictly above tol."""
    if tol < 0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    norms = X.norms()
    hot = np.nonzero(norms > tol)[0] + 1
    return ChunkSupport.of(hot.tolist(), X.idx.K)


def generate_chunk_sparse(K: int, d: int, L: int, T: Iterable[int],
                          rng: np.random.Generator) -> ChunkSparseMatrix:
    """Random chunk-sparse matrix: i.i.d. complex unit-variance Gaussian
    entries on the chunks in T, exact zeros elsewhere."""
    idx = ChunkIndexing(K, d)
    if L < 1:
        raise ValueError(f"L must be positive, got {L}")
    chunks = sorted(set(int(k) for k in T))
    if chunks and (chunks[0] < 1 or chunks[-1] > K):
        raise ValueError(f"support outside 1..{K}: {chunks}")
    data = np.zeros((idx.total_rows, L), dtype=np.complex128)
    for k in chunks:
        block = rng.standard_normal((d, L)) + 1j * rng.standard_normal((d, L))
        data[(k - 1) * d:k * d] = block / np.sqrt(2.0)
    return ChunkSparseMatrix(data, idx)


def generate_support_sequence(params: SupportEvolutionParams, n_frames: int,
                              rng: np.random.Generator,
                              fixed_overlap: Optional[int] = None) -> list[ChunkSupport]:
    """Sequence of supports with |T_i| uniform on {s_bar-2..s_bar} and
    consecutive overlap drawn uniform on {s_c..s_c+2} (or pinned to
    fixed_overlap), clamped to min(|T_i|, |T_i+1|).

    Overlap members are drawn uniformly from the previous support, the
    remainder uniformly from its complement. Raises GenerationError when K
    cannot host two consecutive supports.
    """
    if n_frames < 1:
        raise ValueError(f"n_frames must be positive, got {n_frames}")
    if fixed_overlap is not None and fixed_overlap < 0:
        raise GenerationError(f"fixed_overlap must be nonnegative, got {fixed_overlap}")
    min_ov = params.s_c if fixed_overlap is None else min(params.s_c, fixed_overlap)
    if params.K < 2 * params.s_bar - min_ov:
        raise GenerationError(
            f"K >= 2*s_bar - overlap violated: K={params.K}, s_bar={params.s_bar}, "
            f"overlap floor {min_ov}")

    sizes = [int(rng.integers(params.s_bar - 2, params.s_bar + 1))
             for _ in range(n_frames)]
    universe = np.arange(1, params.K + 1)
    first = rng.choice(universe, size=sizes[0], replace=False)
    supports = [ChunkSupport.of(first.tolist(), params.K)]
    for i in range(1, n_frames):
        prev = supports[-1]
        if fixed_overlap is not None:
            want = fixed_overlap
        else:
            want = int(rng.integers(params.s_c, params.s_c + 3))
        ov = min(want, len(prev), sizes[i])
        keep = rng.choice(np.fromiter(prev, dtype=int, count=len(prev)),
                          size=ov, replace=False)
        pool = np.array(sorted(set(range(1, params.K + 1)) - prev.as_set()), dtype=int)
        fresh = rng.choice(pool, size=sizes[i] - ov, replace=False)
        supports.append(ChunkSupport.of(keep.tolist() + fresh.tolist(), params.K))
    return supports


def validate_prior(prior: PriorSupportInfo, s_bar: int) -> None:
    """Check the prior against an s_bar budget; raises PriorInfoError naming
    the violated inequality."""
    if prior.s_c > len(prior.T0):
        raise PriorInfoError(
            f"s_c <= |T0| violated: s_c={prior.s_c}, |T0|={len(prior.T0)}")
    if len(prior.T0) > s_bar:
        raise PriorInfoError(
            f"|T0| <= s_bar violated: |T0|={len(prior.T0)}, s_bar={s_bar}")
