"""K-theory and K-homology of quantum lens spaces from the Euler-class matrix.

For a weight vector ``m`` satisfying :func:`qlens.weighted.is_admissible`,
with ``A`` the (M+1)x(M+1) integer matrix of the line-bundle class and
``d >= 1``::

    K0  = Coker(1 - A^d)        K1  = Ker(1 - A^d)
    K^0 = Ker(1 - (A^t)^d)      K^1 = Coker(1 - (A^t)^d)

Only the unweighted matrices are built in; weighted ones are read from
files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .lattice import (
    FGAbelianGroup,
    IntMatrix,
    cokernel_group,
    kernel_group,
    matrix_power,
    read_matrix,
)
from .weighted import WeightError, WeightVector, big_m, is_admissible, is_pairwise_coprime

__all__ = [
    "EulerInput",
    "InadmissibleWeightError",
    "KKGroups",
    "builtin_euler_cpn",
    "check_rank_duality",
    "euler_input_from_file",
    "fredholm_count",
    "gysin_kgroups",
    "wp_ktheory_predict",
]


class InadmissibleWeightError(WeightError):
    pass


@dataclass(frozen=True)
class EulerInput:
    A: IntMatrix
    d: int
    provenance: str = "user"

    def __post_init__(self):
        if not self.A.is_square():
            raise ValueError(f"Euler matrix must be square, got {self.A.rows}x{self.A.cols}")
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")

    @property
    def size(self) -> int:
        return self.A.rows


@dataclass(frozen=True)
class KKGroups:
    k0: FGAbelianGroup
    k1: FGAbelianGroup
    k0_hom: FGAbelianGroup
    k1_hom: FGAbelianGroup

    def report(self) -> str:
        return (
            f"K0 = {self.k0}\nK1 = {self.k1}\nK0hom = {self.k0_hom}\nK1hom = {self.k1_hom}\n"
            f"duality: {'ok' if check_rank_duality(self) else 'FAIL'}\n"
        )

    @classmethod
    def parse_report(cls, text: str) -> "KKGroups":
        kv = {}
        for ln in text.splitlines():
            if "=" in ln:
                k, v = ln.split("=", 1)
                kv[k.strip()] = FGAbelianGroup.parse(v)
        return cls(kv["K0"], kv["K1"], kv["K0hom"], kv["K1hom"])


def builtin_euler_cpn(n: int) -> IntMatrix:
    """``I - S`` on the basis ``1, x, ..., x^n`` with ``S`` the subdiagonal shift."""
    if n < 0:
        raise ValueError("dimension must be nonnegative")
    k = n + 1
    return IntMatrix(k, k, (1 if i == j else -1 if i == j + 1 else 0 for i in range(k) for j in range(k)))


def euler_input_from_file(path, d: int) -> EulerInput:
    with open(path) as fh:
        A = read_matrix(fh.read())
    return EulerInput(A, d, f"user-file({path})")


def gysin_kgroups(inp: EulerInput) -> KKGroups:
    one = IntMatrix.identity(inp.size)
    euler = one - matrix_power(inp.A, inp.d)
    euler_t = one - matrix_power(inp.A.transpose(), inp.d)
    return KKGroups(
        k0=cokernel_group(euler),
        k1=kernel_group(euler),
        k0_hom=kernel_group(euler_t),
        k1_hom=cokernel_group(euler_t),
    )


def check_rank_duality(g: KKGroups) -> bool:
    return (
        g.k0.free_rank == g.k1.free_rank
        and g.k0_hom.free_rank == g.k1_hom.free_rank
        and g.k1_hom.torsion == g.k0.torsion
    )


def wp_ktheory_predict(m) -> tuple[FGAbelianGroup, FGAbelianGroup]:
    """K0 and K1 of the weighted projective space, built up one weight at a time.

    Each added weight ``m_j`` contributes an ideal of ``m_j`` copies of the
    compacts, raising the rank of K0 by ``m_j``.
    """
    m = WeightVector.of(m)
    if not is_admissible(m):
        raise InadmissibleWeightError(
            f"weights ({m}) are not admissible: some m_j is not coprime to any earlier weight"
        )
    rank = 1
    for j in range(1, len(m)):
        rank = m[j] + rank
    if rank != 1 + big_m(m):
        raise AssertionError(f"recursion gave rank {rank}, closed form {1 + big_m(m)}")
    return FGAbelianGroup(rank), FGAbelianGroup(0)


def fredholm_count(p) -> int:
    """``1 + sum_{k=1}^{n} p_0 p_1 ... p_{k-1}`` for pairwise coprime ``p``."""
    p = WeightVector.of(p)
    if not is_pairwise_coprime(p):
        raise WeightError(f"weights ({p}) are not pairwise coprime")
    return 1 + sum(math.prod(p.m[:k]) for k in range(1, len(p)))
