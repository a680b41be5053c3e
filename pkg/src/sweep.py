#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
参数扫描模块
Sweep Module - 沿先验方差、后选择半径或损耗扫描 v'/v'_C，可选蒙特卡罗列与方差重定向
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from scipy.optimize import brentq

from src.errors import DomainError, UnsupportedDirectionError
from src.logger import get_logger
from src.montecarlo import SEED_MASK, RunConfig, retarget_variance, run_experiment, substream
from src.report import EstimationReport, montecarlo_report, quadrature_report

logger = get_logger("Sweep")

AXES = ('prior_variance', 'selection_radius', 'loss')
# 重定向随机流的计数器序号，与实验块序号错开
RETARGET_STREAM = 1 << 40
AGREEMENT_SIGMAS = 3.0

SWEEP_COLUMNS = [
    'axis', 'value', 'v', 'r', 'probe_loss', 'ancilla_loss',
    'v_prime', 'v_prime_c', 'ratio', 'select_prob',
    'mc_v_prime', 'mc_v_prime_stderr', 'mc_ratio', 'mc_ratio_stderr',
    'mc_select_prob', 'mc_n_selected', 'mc_agrees',
]


@dataclass(frozen=True)
class SweepSpec:
    """扫描规格：扫描轴、取值、固定的配置模板"""

    axis: str
    values: Tuple[float, ...]
    fixed: RunConfig

    def __post_init__(self):
        if self.axis not in AXES:
            raise DomainError(f"未知扫描轴: {self.axis}，可选 {AXES}")
        if not self.values:
            raise DomainError("扫描取值不能为空")
        for value in self.values:
            if self.axis == 'loss':
                ok = 0.0 <= value <= 1.0
            else:
                ok = math.isfinite(value) and value > 0
            if not ok:
                raise DomainError(f"{self.axis} 取值超出定义域: {value}")

    def config_for(self, value: float) -> RunConfig:
        """把扫描值代入模板"""
        return config_along(self.axis, self.fixed, value)


@dataclass(frozen=True)
class SweepRow:
    """扫描的一行：求积结果与可选的蒙特卡罗结果"""

    axis: str
    value: float
    quadrature: EstimationReport
    montecarlo: Optional[EstimationReport] = None

    @property
    def agrees(self) -> Optional[bool]:
        """蒙特卡罗与求积在 3 个标准误内一致"""
        if self.montecarlo is None:
            return None
        diff = abs(self.montecarlo.v_prime - self.quadrature.v_prime)
        return diff <= AGREEMENT_SIGMAS * self.montecarlo.v_prime_stderr

    def as_row(self) -> Dict[str, Any]:
        q = self.quadrature
        cfg = q.config
        row = {
            'axis': self.axis, 'value': self.value,
            'v': cfg['v'], 'r': cfg['r'],
            'probe_loss': cfg['probe_loss'], 'ancilla_loss': cfg['ancilla_loss'],
            'v_prime': q.v_prime, 'v_prime_c': q.v_prime_c, 'ratio': q.ratio,
            'select_prob': q.select_prob,
        }
        mc = self.montecarlo
        if mc is not None:
            row.update({
                'mc_v_prime': mc.v_prime, 'mc_v_prime_stderr': mc.v_prime_stderr,
                'mc_ratio': mc.ratio, 'mc_ratio_stderr': mc.ratio_stderr,
                'mc_select_prob': mc.select_prob, 'mc_n_selected': mc.n_selected,
                'mc_agrees': self.agrees,
            })
        return row


def config_along(axis: str, template: RunConfig, value: float) -> RunConfig:
    """沿扫描轴替换模板中的一个参数（损耗同时作用于两臂）"""
    if axis == 'prior_variance':
        return replace(template, v=value)
    if axis == 'selection_radius':
        return replace(template, r=value)
    if axis == 'loss':
        return replace(template, probe_loss=value, ancilla_loss=value)
    raise DomainError(f"未知扫描轴: {axis}")


def _evaluate_row(spec: SweepSpec, index: int, mc: int) -> SweepRow:
    """计算一行（顶层函数，供进程池调用）"""
    value = spec.values[index]
    cfg = spec.config_for(value)
    quad = quadrature_report(cfg)
    mc_report = None
    if mc > 0:
        mc_cfg = replace(cfg, n_events=mc, seed=(cfg.seed + index) & SEED_MASK)
        mc_report = montecarlo_report(mc_cfg, run_experiment(mc_cfg))
    logger.info("%s=%.4g: v'/v'_C=%.5f", spec.axis, value, quad.ratio)
    return SweepRow(spec.axis, value, quad, mc_report)


def _check_retarget(spec: SweepSpec, v_source: float) -> List[float]:
    """
    在计算任何行之前检查重定向方向，返回无法重定向（高于源方差）的取值

    Raises:
        DomainError: 扫描轴不是 prior_variance，或源方差非法
        UnsupportedDirectionError: 所有取值都高于源方差
    """
    if spec.axis != 'prior_variance':
        raise DomainError("只有 prior_variance 扫描支持方差重定向")
    if not (math.isfinite(v_source) and v_source > 0):
        raise DomainError(f"重定向源方差必须为正: {v_source}")
    too_large = [v for v in spec.values if v > v_source]
    if len(too_large) == len(spec.values):
        raise UnsupportedDirectionError(f"重定向源 v={v_source} 小于全部扫描取值 {too_large}")
    if too_large:
        logger.warning("重定向源 v=%.4g 小于扫描取值 %s，这些行没有蒙特卡罗列", v_source, too_large)
    return too_large


def _retargeted_rows(spec: SweepSpec, rows: List[SweepRow], mc: int, v_source: float,
                     workers: int) -> List[SweepRow]:
    """
    由 v_source 处的一次实验重定向得到每个取值的蒙特卡罗列（高于 v_source 的行保持为空）
    """
    source_cfg = replace(spec.fixed, v=v_source, n_events=mc)
    kernel = source_cfg.kernel()
    events = run_experiment(source_cfg, workers=workers)

    out = []
    for index, row in enumerate(rows):
        if row.value > v_source:
            out.append(row)
            continue
        rng = substream(source_cfg.seed, RETARGET_STREAM + index)
        survivors = retarget_variance(events, v_source, row.value, rng, kernel)
        report = montecarlo_report(source_cfg, survivors, v=row.value)
        out.append(replace(row, montecarlo=report))
    return out


def run_sweep(spec: SweepSpec, mc: int = 0, workers: int = 1,
              retarget_from: Optional[float] = None) -> List[SweepRow]:
    """
    执行扫描，行顺序与输入顺序一致

    Args:
        spec: 扫描规格
        mc: 每行蒙特卡罗事件数（0 表示只做求积）
        workers: 并行进程数
        retarget_from: 若给出，蒙特卡罗列由该先验方差的一次实验重定向得到

    Returns:
        SweepRow 列表

    Raises:
        DomainError: 非 prior_variance 扫描却给出 retarget_from
        UnsupportedDirectionError: 全部取值都高于 retarget_from
    """
    logger.info("开始扫描 %s: %d 个取值, mc=%d", spec.axis, len(spec.values), mc)
    if retarget_from and mc > 0:
        _check_retarget(spec, retarget_from)
    row_mc = 0 if retarget_from else mc
    indices = range(len(spec.values))

    if workers > 1 and len(spec.values) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_evaluate_row, [spec] * len(indices), indices,
                                     [row_mc] * len(indices)))
    else:
        rows = [_evaluate_row(spec, i, row_mc) for i in indices]

    if retarget_from and mc > 0:
        rows = _retargeted_rows(spec, rows, mc, retarget_from, workers)
    return rows


def ratio_along(axis: str, template: RunConfig, value: float) -> float:
    """求积得到的 v'/v'_C"""
    return quadrature_report(config_along(axis, template, value)).ratio


def locate_crossing(axis: str, template: RunConfig, lo: float, hi: float,
                    xtol: float = 1e-4) -> float:
    """
    用 brentq 求 v'/v'_C = 1 的位置

    Args:
        axis: 扫描轴
        template: 配置模板
        lo, hi: 搜索区间（两端比值需跨过1）
        xtol: 位置容差

    Returns:
        交叉点

    Raises:
        DomainError: 区间两端未跨过1
    """
    f_lo = ratio_along(axis, template, lo) - 1.0
    f_hi = ratio_along(axis, template, hi) - 1.0
    if f_lo * f_hi > 0:
        raise DomainError(f"区间 [{lo}, {hi}] 内 v'/v'_C 未跨过1: {f_lo + 1:.5f}, {f_hi + 1:.5f}")
    crossing = brentq(lambda x: ratio_along(axis, template, x) - 1.0, lo, hi, xtol=xtol)
    logger.info("%s 交叉点: %.5f", axis, crossing)
    return float(crossing)


def sweep_rows_as_dicts(rows: Sequence[SweepRow]) -> List[Dict[str, Any]]:
    return [row.as_row() for row in rows]
