"""Index-coding semantics: codes, side information, alignment checks, decoding.

A scalar linear index code over the reals sends z = sum_i v_i s_i across N
channel uses; receiver k recovers its symbol as

    s_hat_k = (u_k . v_k)^{-1} u_k . (z - sum_{i in V_k} v_i s_i),

which works exactly when u_k . v_k != 0 and u_k . v_i = 0 for every
interfering message i the receiver neither wants nor already knows.  With
X_ij = u_i . v_j those conditions say: unit-scale diagonal, zeros at
positions outside the side-information sets.  Side-information sets are
stored 0-based internally and serialized 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvalidInputError
from .manifold import FactorPoint
from .objectives import SparsityPattern


@dataclass(frozen=True)
class SideInformation:
    """Per-receiver sets of already-known message indices (0-based)."""

    K: int
    sets: tuple

    def __post_init__(self):
        if self.K < 1:
            raise InvalidInputError(f"K must be >= 1, got {self.K}")
        if len(self.sets) != self.K:
            raise InvalidInputError(f"expected {self.K} sets, got {len(self.sets)}")
        norm_sets = tuple(tuple(sorted(set(s))) for s in self.sets)
        for i, s in enumerate(norm_sets):
            for j in s:
                if not (0 <= j < self.K):
                    raise InvalidInputError(f"index {j} out of range in set {i}")
            if i in s:
                raise InvalidInputError(f"receiver {i} cannot know its own message")
        object.__setattr__(self, "sets", norm_sets)

    def amount(self) -> int:
        return sum(len(s) for s in self.sets)

    def to_json(self) -> str:
        """Serialize as {"K": ..., "sets": [[...], ...]} with 1-based indices."""
        doc = {"K": self.K, "sets": [[j + 1 for j in s] for s in self.sets]}
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "SideInformation":
        doc = json.loads(text)
        try:
            K = int(doc["K"])
            sets = tuple(tuple(int(j) - 1 for j in s) for s in doc["sets"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed side-information document: {exc}")
        return cls(K, sets)


@dataclass(frozen=True)
class IndexCode:
    """Blocklength-N code: one precoder and one decoder row vector per user."""

    N: int
    precoders: np.ndarray  # (K, N), row j is v_j
    decoders: np.ndarray  # (K, N), row i is u_i

    def reconstruct_matrix(self) -> np.ndarray:
        """X with X_ij = u_i . v_j."""
        return self.decoders @ self.precoders.T


def code_from_factors(x: FactorPoint) -> IndexCode:
    """Rows of U are decoders, rows of V are precoders, blocklength N = r."""
    return IndexCode(N=x.r, precoders=np.array(x.V), decoders=np.array(x.U))


def pattern_to_side_info(pattern: SparsityPattern) -> SideInformation:
    """Off-diagonal nonzeros of the pattern are the side-information slots."""
    P = pattern.P
    K = pattern.K
    sets = tuple(
        tuple(j for j in range(K) if j != i and P[i, j] == 1.0) for i in range(K)
    )
    return SideInformation(K, sets)


def side_info_amount(pattern: SparsityPattern) -> int:
    """nnz(P) - K, the total number of known-elsewhere messages."""
    return pattern.nnz() - pattern.K


def achievable_rate(rank: int) -> float:
    """Per-user data rate 1/rank of a blocklength-rank code."""
    if rank < 1:
        raise InvalidInputError(f"rank must be >= 1, got {rank}")
    return 1.0 / rank


def sum_rate(K: int, rank: int) -> float:
    """Total rate K/rank across all users."""
    if K < 1:
        raise InvalidInputError(f"K must be >= 1, got {K}")
    return K * achievable_rate(rank)


@dataclass(frozen=True)
class AlignmentReport:
    passed: bool
    max_residual: float
    location: tuple  # (row, col) of the worst violation, or ()

    def __bool__(self) -> bool:
        return self.passed


def verify_alignment(X, pattern: SparsityPattern, tol: float) -> AlignmentReport:
    """Check unit diagonal and zeros at pattern zeros, within tol.

    The diagonal test |X_kk - 1| <= tol is the post-renormalization contract,
    strictly stronger than mere nonzeroness.
    """
    X = linalg.as_matrix(X, "X")
    if X.shape != pattern.P.shape:
        raise InvalidInputError(
            f"shape mismatch: X {X.shape} vs pattern {pattern.P.shape}"
        )
    diag_res = np.abs(np.diagonal(X) - 1.0)
    zero_res = np.abs(X) * pattern.zero_mask()
    worst = 0.0
    where = ()
    k = int(np.argmax(diag_res))
    if diag_res[k] > worst:
        worst = float(diag_res[k])
        where = (k, k)
    ij = np.unravel_index(int(np.argmax(zero_res)), zero_res.shape)
    if zero_res[ij] > worst:
        worst = float(zero_res[ij])
        where = (int(ij[0]), int(ij[1]))
    return AlignmentReport(passed=worst <= tol, max_residual=worst, location=where)


def decode_simulation(
    code: IndexCode, side: SideInformation, trials: int, seed
) -> float:
    """Max relative decode error over Gaussian-symbol trials.

    For each trial the full transmit vector is formed, every receiver cancels
    its known interference and projects with its decoder; the worst
    |s_hat_k - s_k| / max(1, |s_k|) over receivers and trials is returned.
    """
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    K = code.precoders.shape[0]
    if side.K != K:
        raise InvalidInputError(f"side information K {side.K} != code K {K}")
    gains = np.einsum("kn,kn->k", code.decoders, code.precoders)  # u_k . v_k
    if np.any(np.abs(gains) < 1e-12):
        raise InvalidInputError("degenerate code: some u_k . v_k is below 1e-12")

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        s = rng.standard_normal(K)
        z = code.precoders.T @ s
        for k in range(K):
            known = side.sets[k]
            cancel = z.copy()
            for i in known:
                cancel -= code.precoders[i] * s[i]
            s_hat = float(code.decoders[k] @ cancel) / gains[k]
            err = abs(s_hat - s[k]) / max(1.0, abs(s[k]))
            if err > worst:
                worst = err
    return worst
