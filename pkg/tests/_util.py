from functools import lru_cache

from artifact.action import Engine
from artifact.qalgebra import Truncation, build_basis


@lru_cache(maxsize=None)
def table(N, sign, K, L, M=None):
    return build_basis(Truncation(N, sign, K, L + K - 1 if M is None else M, L))


@lru_cache(maxsize=None)
def engine(N, sign, K, L, M=None):
    return Engine(table(N, sign, K, L, M))
