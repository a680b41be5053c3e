#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
经典极限模块
Bounds Module - 经典极限 v'_C（真空探测态 + 真空辅助态的双零差误差）
"""

from dataclasses import dataclass
from functools import lru_cache

from src.errors import DomainError
from src.estimation import PriorModel, build_likelihood, expected_error_quadrature, LikelihoodKernel
from src.logger import get_logger
from src.wigner_core import PhotonMixture

logger = get_logger("Bounds")


@dataclass(frozen=True)
class ClassicalLimit:
    """先验方差 v 下的经典极限"""

    v: float
    v_prime_c: float

    def __post_init__(self):
        if not (0.0 < self.v_prime_c < self.v):
            raise DomainError(f"经典极限必须满足 0 < v'_C < v: v={self.v}, v'_C={self.v_prime_c}")


@lru_cache(maxsize=1)
def vacuum_kernel() -> LikelihoodKernel:
    """真空探测态与真空辅助态的似然核"""
    vacuum = PhotonMixture.fock(0)
    return build_likelihood(vacuum, vacuum)


def classical_limit_closed_form(v: float) -> float:
    """经典极限的闭式解 2v/(v+2)"""
    if not v > 0:
        raise DomainError(f"先验方差 v 必须为正: {v}")
    return 2.0 * v / (v + 2.0)


def classical_limit(v: float, r: float) -> ClassicalLimit:
    """
    经典极限：用真空输入运行同一双零差方案的求积

    高斯后验方差与测量结果无关，因此结果不依赖 r，等于 2v/(v+2)。

    Args:
        v: 先验方差
        r: 后选择半径

    Returns:
        ClassicalLimit
    """
    if not v > 0:
        raise DomainError(f"先验方差 v 必须为正: {v}")
    if not r > 0:
        raise DomainError(f"后选择半径必须为正: {r}")
    v_prime_c, _ = expected_error_quadrature(PriorModel(v), vacuum_kernel(), r)
    logger.debug("经典极限: v=%.6g r=%.6g -> %.10g", v, r, v_prime_c)
    return ClassicalLimit(v, v_prime_c)
