#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
蒙特卡罗模块
Monte-Carlo Module - 重放实验：先验抽样位移、似然抽样测量结果、后选择与估计、方差重定向

随机数: Philox 计数器型生成器，key 取自种子，计数器高位放块序号，
每块 BLOCK_SIZE 个事件使用独立子流，块划分与工作进程数无关，串行/并行结果逐位一致；
每块抽取数固定，改变事件数只截断序列，不改变已有事件。
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import DomainError, EnvelopeError, UnsupportedDirectionError
from src.estimation import (Displacement, LikelihoodKernel, Outcome, PriorModel, SQRT2,
                            build_likelihood, posterior_batch)
from src.logger import get_logger
from src.wigner_core import PhotonMixture, apply_loss

logger = get_logger("MonteCarlo")

BLOCK_SIZE = 4096
ENVELOPE_SAFETY = 1.1
# 包络最大值的兜底网格: s ∈ [0, MAX_FACTOR_SPAN/δ]
MAX_FACTOR_SPAN = 60.0
MAX_FACTOR_GRID = 4001
SEED_MASK = (1 << 64) - 1

# 实测的四个先验方差及其事件数
REFERENCE_RUNS = {0.13: 165741, 0.34: 168917, 0.8: 125339, 1.2: 117375}


@dataclass(frozen=True)
class EventRecord:
    """单次实验事件"""

    xi: float
    eta: float
    y_x: float
    y_p: float
    selected: bool
    est_xi: float = math.nan
    est_eta: float = math.nan
    sq_err: float = math.nan

    def with_estimates(self, est_xi: float, est_eta: float) -> "EventRecord":
        sq_err = (self.xi - est_xi) ** 2 + (self.eta - est_eta) ** 2
        return replace(self, est_xi=est_xi, est_eta=est_eta, sq_err=sq_err)


@dataclass(frozen=True)
class RunConfig:
    """一次蒙特卡罗实验的配置"""

    v: float
    r: float
    probe_mixture: PhotonMixture
    ancilla_mixture: PhotonMixture
    n_events: int
    seed: int
    probe_loss: float = 0.0
    ancilla_loss: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.v) and self.v > 0):
            raise DomainError(f"先验方差 v 必须为正: {self.v}")
        if not (math.isfinite(self.r) and self.r >= 0):
            raise DomainError(f"后选择半径不能为负: {self.r}")
        if int(self.n_events) != self.n_events or self.n_events < 1:
            raise DomainError(f"事件数必须 ≥ 1: {self.n_events}")
        if not (0 <= int(self.seed) <= SEED_MASK):
            raise DomainError(f"种子必须是64位无符号整数: {self.seed}")
        for name in ("probe_loss", "ancilla_loss"):
            loss = getattr(self, name)
            if not (0.0 <= loss <= 1.0):
                raise DomainError(f"{name} 必须在 [0, 1] 内: {loss}")

    @property
    def effective_probe(self) -> PhotonMixture:
        return apply_loss(self.probe_mixture, self.probe_loss)

    @property
    def effective_ancilla(self) -> PhotonMixture:
        return apply_loss(self.ancilla_mixture, self.ancilla_loss)

    @property
    def prior(self) -> PriorModel:
        return PriorModel(self.v)

    def kernel(self) -> LikelihoodKernel:
        return build_likelihood(self.effective_probe, self.effective_ancilla)


def substream(seed: int, index: int) -> np.random.Generator:
    """
    计数器型子流

    Args:
        seed: 64位种子
        index: 子流序号（块序号）

    Returns:
        numpy Generator
    """
    bit_generator = np.random.Philox(key=int(seed) & SEED_MASK, counter=[0, 0, int(index), 0])
    return np.random.Generator(bit_generator)


class OutcomeSampler:
    """
    似然核的精确拒绝采样器

    s = |u|² 的密度 ∝ exp(-λs)·P(s)。建议分布 s ~ Exp(μ)，
    接受概率 P(s)·exp(-(λ-μ)s)/c，c = 1.1·max_s P(s)·exp(-(λ-μ)s)。
    P 为常数时 μ = λ，否则 μ = λ/2，保证包络有界。
    """

    def __init__(self, kernel: LikelihoodKernel):
        self.kernel = kernel
        f = kernel.kernel
        self.poly = np.polynomial.Polynomial(f.coeffs[:f.degree + 1])
        self.lam = f.lam
        self.rate = f.lam if f.degree == 0 else f.lam / 2.0
        self.decay = self.lam - self.rate
        self.bound = ENVELOPE_SAFETY * self._max_factor()

    def _max_factor(self) -> float:
        """P(s)·exp(-δs) 在 s ≥ 0 上的最大值（端点、驻点，另加粗网格兜底）"""
        candidates = [0.0]
        if self.poly.degree() > 0:
            stationary = self.poly.deriv() - self.decay * self.poly
            for root in stationary.roots():
                # 近重根：虚部容差取相对 1e-6
                if abs(root.imag) <= 1e-6 * (1.0 + abs(root.real)) and root.real > 0:
                    candidates.append(float(root.real))
            candidates.extend(np.linspace(0.0, MAX_FACTOR_SPAN / self.decay, MAX_FACTOR_GRID))
        s = np.array(candidates)
        values = self.poly(s) * np.exp(-self.decay * s)
        peak = float(values.max())
        if not (math.isfinite(peak) and peak > 0):
            raise EnvelopeError(f"无法构造拒绝采样包络: max={peak}, 系数={self.poly.coef}")
        return peak

    def sample_u(self, rng: np.random.Generator, size: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        从核 K(u) 抽取 u = √2·y - d

        Returns:
            (u_x, u_p)
        """
        s_out = np.empty(size)
        filled = 0
        while filled < size:
            k = size - filled
            s = rng.exponential(1.0 / self.rate, size=k)
            accept_prob = self.poly(s) * np.exp(-self.decay * s) / self.bound
            if np.any(accept_prob > 1.0):
                raise EnvelopeError(f"接受概率超过1: {float(accept_prob.max())}")
            accept = rng.random(k) < accept_prob
            n_accept = int(accept.sum())
            s_out[filled:filled + n_accept] = s[accept]
            filled += n_accept
        theta = rng.uniform(0.0, 2.0 * math.pi, size=size)
        radius = np.sqrt(s_out)
        return radius * np.cos(theta), radius * np.sin(theta)


def sample_displacement(prior: PriorModel, rng: np.random.Generator) -> Displacement:
    """
    从先验抽取位移：ξ, η 独立，零均值，每轴方差 v/2

    Args:
        prior: 先验模型
        rng: 随机数生成器

    Returns:
        Displacement
    """
    xi, eta = rng.normal(0.0, math.sqrt(prior.axis_variance), size=2)
    return Displacement(float(xi), float(eta))


def sample_outcome(k: LikelihoodKernel, d: Displacement, rng: np.random.Generator,
                   sampler: Optional[OutcomeSampler] = None) -> Outcome:
    """
    从似然 p(y|d) 抽取测量结果

    Args:
        k: 似然核
        d: 位移
        rng: 随机数生成器
        sampler: 可复用的采样器

    Returns:
        Outcome
    """
    sampler = sampler or OutcomeSampler(k)
    ux, up = sampler.sample_u(rng, 1)
    return Outcome(float((ux[0] + d.xi) / SQRT2), float((up[0] + d.eta) / SQRT2))


def _simulate_block(cfg: RunConfig, block: int) -> Tuple[np.ndarray, ...]:
    """
    模拟一个事件块，返回各列数组

    每块总是抽取 BLOCK_SIZE 个事件再截断，事件序列与 n_events 无关（同一种子的前缀稳定）。
    """
    start = block * BLOCK_SIZE
    size = min(BLOCK_SIZE, cfg.n_events - start)
    rng = substream(cfg.seed, block)
    kernel = cfg.kernel()
    sampler = OutcomeSampler(kernel)

    sigma = math.sqrt(cfg.prior.axis_variance)
    xi = rng.normal(0.0, sigma, size=BLOCK_SIZE)[:size]
    eta = rng.normal(0.0, sigma, size=BLOCK_SIZE)[:size]
    ux, up = sampler.sample_u(rng, BLOCK_SIZE)
    y_x = (ux[:size] + xi) / SQRT2
    y_p = (up[:size] + eta) / SQRT2
    selected = y_x * y_x + y_p * y_p < cfg.r * cfg.r

    est_xi = np.full(size, np.nan)
    est_eta = np.full(size, np.nan)
    if np.any(selected):
        mean_xi, mean_eta, *_ = posterior_batch(cfg.prior, kernel, y_x[selected], y_p[selected])
        est_xi[selected] = mean_xi
        est_eta[selected] = mean_eta
    sq_err = (xi - est_xi) ** 2 + (eta - est_eta) ** 2
    return xi, eta, y_x, y_p, selected, est_xi, est_eta, sq_err


def events_from_columns(columns: Sequence[np.ndarray]) -> List[EventRecord]:
    """由列数组构造事件列表"""
    xi, eta, y_x, y_p, selected, est_xi, est_eta, sq_err = columns
    return [
        EventRecord(float(a), float(b), float(c), float(d), bool(s), float(e), float(f), float(g))
        for a, b, c, d, s, e, f, g in zip(xi, eta, y_x, y_p, selected, est_xi, est_eta, sq_err)
    ]


def run_experiment(cfg: RunConfig, workers: int = 1) -> List[EventRecord]:
    """
    运行一次实验：抽位移、抽测量结果、后选择、对被选中事件计算后验均值

    Args:
        cfg: 实验配置
        workers: 工作进程数（不影响结果）

    Returns:
        按事件序号排列的 EventRecord 列表
    """
    n_blocks = -(-cfg.n_events // BLOCK_SIZE)
    logger.info("运行实验: v=%.4g r=%.4g 事件数=%d 种子=%d 块数=%d",
                cfg.v, cfg.r, cfg.n_events, cfg.seed, n_blocks)

    if workers > 1 and n_blocks > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            blocks = list(executor.map(_simulate_block, [cfg] * n_blocks, range(n_blocks)))
    else:
        blocks = [_simulate_block(cfg, b) for b in range(n_blocks)]

    columns = [np.concatenate(col) for col in zip(*blocks)]
    events = events_from_columns(columns)
    n_selected = int(columns[4].sum())
    logger.info("实验完成: 选中 %d / %d", n_selected, cfg.n_events)
    return events


def retarget_variance(events: Sequence[EventRecord], v_source: float, v_target: float,
                      rng: np.random.Generator, kernel: LikelihoodKernel) -> List[EventRecord]:
    """
    方差重定向：拒绝重采样使存活事件的位移服从方差 v_target 的先验

    接受概率 p_target/(M·p_source)，M = v_source/v_target，
    化简为 exp(-|d|²·(1/v_target - 1/v_source))。存活且被选中的事件用新先验重算估计值。

    Args:
        events: 原始事件
        v_source: 原先验方差
        v_target: 目标先验方差（≤ v_source）
        rng: 随机数生成器
        kernel: 似然核

    Returns:
        重定向后的事件列表

    Raises:
        UnsupportedDirectionError: v_target > v_source
    """
    if not (v_source > 0 and v_target > 0):
        raise DomainError(f"先验方差必须为正: v_source={v_source}, v_target={v_target}")
    if v_target > v_source:
        raise UnsupportedDirectionError(
            f"只支持向下重定向: v_target={v_target} > v_source={v_source}")

    xi = np.array([e.xi for e in events], dtype=float)
    eta = np.array([e.eta for e in events], dtype=float)
    accept_prob = np.exp(-(xi * xi + eta * eta) * (1.0 / v_target - 1.0 / v_source))
    keep = rng.random(len(events)) < accept_prob

    survivors = [e for e, k in zip(events, keep) if k]
    selected = [i for i, e in enumerate(survivors) if e.selected]
    if selected:
        y_x = np.array([survivors[i].y_x for i in selected])
        y_p = np.array([survivors[i].y_p for i in selected])
        mean_xi, mean_eta, *_ = posterior_batch(PriorModel(v_target), kernel, y_x, y_p)
        for i, mx, my in zip(selected, mean_xi, mean_eta):
            survivors[i] = survivors[i].with_estimates(float(mx), float(my))

    logger.info("方差重定向 %.4g -> %.4g: 保留 %d / %d 事件",
                v_source, v_target, len(survivors), len(events))
    return survivors


def reanalyze(events: Sequence[EventRecord], prior: PriorModel, kernel: LikelihoodKernel,
              r: float) -> List[EventRecord]:
    """
    按半径 r 重新后选择，并用给定先验重算被选中事件的估计值

    未被选中的事件估计值记为 nan。
    """
    if not (math.isfinite(r) and r >= 0):
        raise DomainError(f"后选择半径不能为负: {r}")
    y_x = np.array([e.y_x for e in events], dtype=float)
    y_p = np.array([e.y_p for e in events], dtype=float)
    selected = y_x * y_x + y_p * y_p < r * r

    out = [replace(e, selected=bool(s), est_xi=math.nan, est_eta=math.nan, sq_err=math.nan)
           for e, s in zip(events, selected)]
    if np.any(selected):
        mean_xi, mean_eta, *_ = posterior_batch(prior, kernel, y_x[selected], y_p[selected])
        for i, mx, my in zip(np.flatnonzero(selected), mean_xi, mean_eta):
            out[i] = out[i].with_estimates(float(mx), float(my))

    logger.info("重新分析: r=%.4g v=%.4g 选中 %d / %d", r, prior.v, int(selected.sum()), len(events))
    return out
