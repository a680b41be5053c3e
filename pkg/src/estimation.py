#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
贝叶斯估计模块
Estimation Module - 先验、似然、后验、后验均值估计、后选择与估计误差

似然归一化: p(y|d) = 2·K(√2·y - d)，K = W1*W2，因子2是 y → √2·y 的雅可比行列式。
后验积分使用以高斯近似均值为中心的极坐标乘积规则：
径向对 t = ρ² 用 Gauss-Laguerre，角向用梯形公式。被积函数是多项式乘高斯，
节点数足够时该规则精确到舍入误差。
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from src.errors import (DegeneratePosteriorError, DegenerateSelectionError, DomainError,
                        NoEventsError)
from src.logger import get_logger
from src.wigner_core import (PhotonMixture, RadialPolyGaussian, convolve, is_nonnegative,
                             mixture_wigner)

logger = get_logger("Estimation")

SQRT2 = math.sqrt(2.0)

# 后验积分规则
LAGUERRE_NODES = 16
ANGULAR_NODES = 48
# 选择圆盘上的 Gauss-Legendre 径向节点
RADIAL_NODES = 96

MIN_SELECT_PROB = 1e-12


@dataclass(frozen=True)
class PriorModel:
    """各向同性高斯先验，v 为两个分量的总方差（每轴 v/2）"""

    v: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and self.v > 0):
            raise DomainError(f"先验方差 v 必须为正: {self.v}")

    @property
    def axis_variance(self) -> float:
        return self.v / 2.0


@dataclass(frozen=True)
class Displacement:
    """位移参数 (ξ, η)"""

    xi: float
    eta: float

    def __post_init__(self):
        if not (math.isfinite(self.xi) and math.isfinite(self.eta)):
            raise DomainError(f"位移必须有限: ({self.xi}, {self.eta})")


@dataclass(frozen=True)
class Outcome:
    """双零差测量结果 (y_x, y_p)"""

    y_x: float
    y_p: float

    def __post_init__(self):
        if not (math.isfinite(self.y_x) and math.isfinite(self.y_p)):
            raise DomainError(f"测量结果必须有限: ({self.y_x}, {self.y_p})")


@dataclass(frozen=True)
class LikelihoodKernel:
    """
    似然核 K = W1*W2（积分为1，逐点非负）

    probe / ancilla 仅作记录，由任意径向函数构造时为 None。
    """

    kernel: RadialPolyGaussian
    probe: Optional[PhotonMixture] = None
    ancilla: Optional[PhotonMixture] = None

    @classmethod
    def from_function(cls, f: RadialPolyGaussian) -> "LikelihoodKernel":
        """
        由任意非负径向函数构造（归一化到积分1）

        Raises:
            DomainError: 积分非正或函数出现负值
        """
        mass = f.integral()
        if not (math.isfinite(mass) and mass > 0):
            raise DomainError(f"核函数积分必须为正: {mass}")
        normalized = f.scaled(1.0 / mass)
        if not is_nonnegative(normalized):
            raise DomainError("似然核必须逐点非负")
        return cls(normalized)

    @property
    def lam(self) -> float:
        return self.kernel.lam


@dataclass(frozen=True)
class PosteriorSummary:
    """后验均值与方差"""

    mean_xi: float
    mean_eta: float
    var_xi: float
    var_eta: float
    log_evidence: float

    @property
    def total_variance(self) -> float:
        return self.var_xi + self.var_eta


@dataclass(frozen=True)
class ErrorEstimate:
    """估计误差 v' 及其标准误"""

    v_prime: float
    stderr: float
    n_selected: int


def prior_density(prior: PriorModel, d: Displacement) -> float:
    """
    先验密度 exp(-(ξ²+η²)/v)/(πv)

    Args:
        prior: 先验模型
        d: 位移

    Returns:
        密度值
    """
    return math.exp(-(d.xi * d.xi + d.eta * d.eta) / prior.v) / (math.pi * prior.v)


def build_likelihood(probe: PhotonMixture, ancilla: PhotonMixture) -> LikelihoodKernel:
    """
    由探测态和辅助态构造似然核 K = W_probe * W_ancilla

    对任意（包括不完美的）单光子态成立。

    Args:
        probe: 探测态光子数分布
        ancilla: 辅助态光子数分布

    Returns:
        LikelihoodKernel
    """
    kernel = convolve(mixture_wigner(probe), mixture_wigner(ancilla))
    logger.debug("似然核: λ=%.6g, 系数=%s", kernel.lam, kernel.coeffs)
    return LikelihoodKernel(kernel, probe, ancilla)


def likelihood_density(k: LikelihoodKernel, y: Outcome, d: Displacement) -> float:
    """
    归一化似然 p(y|d) = 2·K(√2·y_x - ξ, √2·y_p - η)

    Args:
        k: 似然核
        y: 测量结果
        d: 位移

    Returns:
        密度值（≥ 0）
    """
    ux = SQRT2 * y.y_x - d.xi
    up = SQRT2 * y.y_p - d.eta
    return max(0.0, 2.0 * float(k.kernel.at_s(ux * ux + up * up)))


@lru_cache(maxsize=8)
def polar_rule(laguerre_nodes: int = LAGUERRE_NODES,
               angular_nodes: int = ANGULAR_NODES) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    单位高斯权 exp(-|z|²) 下的极坐标乘积规则

    Returns:
        (节点x分量, 节点y分量, 权重)，∫ exp(-|z|²) g(z) d²z ≈ Σ w·g(z)
    """
    t, wt = np.polynomial.laguerre.laggauss(laguerre_nodes)
    theta = 2.0 * math.pi * np.arange(angular_nodes) / angular_nodes
    rho = np.sqrt(t)
    zx = np.outer(rho, np.cos(theta)).ravel()
    zy = np.outer(rho, np.sin(theta)).ravel()
    # d²z = ρ dρ dθ = dt dθ / 2
    w = np.outer(wt, np.full(angular_nodes, math.pi / angular_nodes)).ravel()
    for arr in (zx, zy, w):
        arr.setflags(write=False)
    return zx, zy, w


def _posterior_moments(prior: PriorModel, k: LikelihoodKernel, yx: np.ndarray, yp: np.ndarray,
                       rule: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]] = None):
    """
    批量计算后验矩

    prior·likelihood = 2/(πv)·exp(-ab/γ·|x0|²)·exp(-γ|d-m|²)·P(|x0-d|²)，
    a = 1/v，b = λ，γ = a+b，x0 = √2·y，m = b·x0/γ。

    Returns:
        (mean_xi, mean_eta, var_xi, var_eta, log_evidence, J)，J 为高斯因子外的积分
    """
    zx, zy, w = rule if rule is not None else polar_rule()
    a = 1.0 / prior.v
    b = k.lam
    gamma = a + b
    scale = 1.0 / math.sqrt(gamma)

    x0x = SQRT2 * np.asarray(yx, dtype=float)
    x0y = SQRT2 * np.asarray(yp, dtype=float)
    mx = (b / gamma) * x0x
    my = (b / gamma) * x0y

    # 节点相对中心的偏移
    ox = scale * zx
    oy = scale * zy
    # x0 - d = (a/γ)·x0 - offset
    rx = (a / gamma) * x0x[:, None] - ox[None, :]
    ry = (a / gamma) * x0y[:, None] - oy[None, :]
    weights = k.kernel.polynomial_at(rx * rx + ry * ry) * (w / gamma)[None, :]

    J = weights.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        dx = (weights * ox[None, :]).sum(axis=1) / J
        dy = (weights * oy[None, :]).sum(axis=1) / J
        var_xi = (weights * (ox[None, :] - dx[:, None]) ** 2).sum(axis=1) / J
        var_eta = (weights * (oy[None, :] - dy[:, None]) ** 2).sum(axis=1) / J
        log_evidence = (math.log(2.0 / (math.pi * prior.v))
                        - (a * b / gamma) * (x0x * x0x + x0y * x0y) + np.log(J))

    return mx + dx, my + dy, var_xi, var_eta, log_evidence, J


def _is_degenerate(J: np.ndarray) -> np.ndarray:
    return ~np.isfinite(J) | (J <= 0.0)


def posterior_batch(prior: PriorModel, k: LikelihoodKernel, yx: Sequence[float],
                    yp: Sequence[float]) -> Tuple[np.ndarray, ...]:
    """
    批量后验均值（蒙特卡罗路径）

    Args:
        prior: 先验模型
        k: 似然核
        yx, yp: 测量结果数组

    Returns:
        (mean_xi, mean_eta, var_xi, var_eta, log_evidence)，退化的事件为 nan
    """
    yx = np.atleast_1d(np.asarray(yx, dtype=float))
    yp = np.atleast_1d(np.asarray(yp, dtype=float))
    mean_xi, mean_eta, var_xi, var_eta, log_ev, J = _posterior_moments(prior, k, yx, yp)
    bad = _is_degenerate(J)
    if np.any(bad):
        logger.warning("%d 个事件的后验退化，估计值记为 nan", int(bad.sum()))
        for arr in (mean_xi, mean_eta, var_xi, var_eta, log_ev):
            arr[bad] = np.nan
    return mean_xi, mean_eta, np.maximum(var_xi, 0.0), np.maximum(var_eta, 0.0), log_ev


def posterior_mean(prior: PriorModel, k: LikelihoodKernel, y: Outcome) -> PosteriorSummary:
    """
    后验均值估计 ξ̃ = ∫∫ ξ p(ξ,η|y) dξdη（η̃ 同理）

    Args:
        prior: 先验模型
        k: 似然核
        y: 测量结果

    Returns:
        PosteriorSummary

    Raises:
        DegeneratePosteriorError: 证据下溢
    """
    mean_xi, mean_eta, var_xi, var_eta, log_ev, J = _posterior_moments(
        prior, k, np.array([y.y_x]), np.array([y.y_p]))
    if _is_degenerate(J)[0]:
        raise DegeneratePosteriorError(f"测量结果 ({y.y_x}, {y.y_p}) 处后验退化")
    return PosteriorSummary(float(mean_xi[0]), float(mean_eta[0]),
                            max(0.0, float(var_xi[0])), max(0.0, float(var_eta[0])),
                            float(log_ev[0]))


def posterior_density(prior: PriorModel, k: LikelihoodKernel, y: Outcome, d: Displacement) -> float:
    """
    归一化后验密度 p(d|y) = p(d)·p(y|d)/p(y)

    Args:
        prior: 先验模型
        k: 似然核
        y: 测量结果
        d: 位移

    Returns:
        后验密度

    Raises:
        DegeneratePosteriorError: 证据下溢
    """
    summary = posterior_mean(prior, k, y)
    a = 1.0 / prior.v
    b = k.lam
    gamma = a + b
    x0x, x0y = SQRT2 * y.y_x, SQRT2 * y.y_p
    ux, up = x0x - d.xi, x0y - d.eta
    # 与 log_evidence 相同的高斯因子分解，避免下溢
    log_gauss = (-(a * b / gamma) * (x0x * x0x + x0y * x0y)
                 - gamma * ((d.xi - b * x0x / gamma) ** 2 + (d.eta - b * x0y / gamma) ** 2))
    value = (2.0 / (math.pi * prior.v)) * float(k.kernel.polynomial_at(ux * ux + up * up))
    return max(0.0, value * math.exp(log_gauss - summary.log_evidence))


def post_select(y: Outcome, r: float) -> bool:
    """
    后选择条件 y_x² + y_p² < r²（严格不等号）

    Raises:
        DomainError: r < 0
    """
    if r < 0:
        raise DomainError(f"后选择半径不能为负: {r}")
    return y.y_x * y.y_x + y.y_p * y.y_p < r * r


def estimation_error(events: Iterable) -> ErrorEstimate:
    """
    估计误差 v' = <(ξ-ξ̃)²> + <(η-η̃)²>，对所有被选中且有估计值的事件平均

    Args:
        events: EventRecord 序列

    Returns:
        ErrorEstimate（均值、均值标准误、事件数）

    Raises:
        NoEventsError: 没有被选中的事件
    """
    chosen = [e.sq_err for e in events if e.selected]
    sq = np.array([x for x in chosen if math.isfinite(x)], dtype=float)
    if len(chosen) > sq.size:
        logger.warning("丢弃 %d 个没有有限估计值的被选中事件（后验退化）", len(chosen) - sq.size)
    if sq.size == 0:
        raise NoEventsError("没有被后选择的事件")
    stderr = float(sq.std(ddof=1) / math.sqrt(sq.size)) if sq.size > 1 else 0.0
    return ErrorEstimate(math.fsum(sq) / sq.size, stderr, int(sq.size))


def expected_error_quadrature(prior: PriorModel, k: LikelihoodKernel, r: float,
                              radial_nodes: int = RADIAL_NODES) -> Tuple[float, float]:
    """
    确定性求积得到 v' 和选择概率

    后验均值估计量的均方误差等于后验方差的期望：
    v' = ∫_{|y|<r} p(y)·TV(y) dy / P(sel)，P(sel) = ∫_{|y|<r} p(y) dy。
    p(y) 与 TV(y) 都只依赖 |y|，化为 [0, r] 上的一维 Gauss-Legendre 积分。

    Args:
        prior: 先验模型
        k: 似然核
        r: 后选择半径

    Returns:
        (v_prime, select_prob)

    Raises:
        DegenerateSelectionError: 选择概率低于 1e-12
    """
    if not r > 0:
        raise DomainError(f"后选择半径必须为正: {r}")

    nodes, weights = np.polynomial.legendre.leggauss(radial_nodes)
    rho = 0.5 * r * (nodes + 1.0)
    w = 0.5 * r * weights * 2.0 * math.pi * rho

    _, _, var_xi, var_eta, log_ev, J = _posterior_moments(prior, k, rho, np.zeros_like(rho))
    if np.any(_is_degenerate(J)):
        raise DegenerateSelectionError(f"半径 r={r} 内后验退化")

    evidence = np.exp(log_ev)
    select_prob = float(np.dot(w, evidence))
    if not select_prob >= MIN_SELECT_PROB:
        raise DegenerateSelectionError(f"选择概率过小: {select_prob:.3e} (r={r})")

    v_prime = float(np.dot(w, evidence * (var_xi + var_eta))) / select_prob
    logger.debug("求积: v=%.6g r=%.6g -> v'=%.8g, P(sel)=%.6g", prior.v, r, v_prime, select_prob)
    return v_prime, min(select_prob, 1.0)
