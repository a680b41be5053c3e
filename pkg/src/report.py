#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
估计报告模块
Report Module - 由事件或求积结果生成 EstimationReport
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Sequence

from src.bounds import classical_limit
from src.estimation import estimation_error, expected_error_quadrature
from src.montecarlo import EventRecord, RunConfig
from src.utils import format_mixture

REPORT_COLUMNS = [
    'source', 'v', 'r', 'probe', 'ancilla', 'probe_loss', 'ancilla_loss', 'n_events', 'seed',
    'v_prime', 'v_prime_stderr', 'v_prime_c', 'ratio', 'ratio_stderr', 'select_prob', 'n_selected',
]


@dataclass(frozen=True)
class EstimationReport:
    """一个 (v, r, probe, ancilla) 配置的估计结果"""

    config: Dict[str, Any]
    source: str
    v_prime: float
    v_prime_stderr: float
    v_prime_c: float
    select_prob: float
    n_selected: int
    ratio: float = field(init=False)
    ratio_stderr: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'ratio', self.v_prime / self.v_prime_c)
        object.__setattr__(self, 'ratio_stderr', self.v_prime_stderr / self.v_prime_c)

    def beats_classical(self, sigmas: float = 1.645) -> bool:
        """比值上界 ratio + k·stderr 是否小于1（默认单侧95%）"""
        return self.ratio + sigmas * self.ratio_stderr < 1.0

    def as_row(self) -> Dict[str, Any]:
        row = dict(self.config)
        row.update({k: v for k, v in asdict(self).items() if k != 'config'})
        return {column: row.get(column, '') for column in REPORT_COLUMNS}


def config_echo(cfg: RunConfig) -> Dict[str, Any]:
    """RunConfig 的可序列化回显"""
    return {
        'v': cfg.v,
        'r': cfg.r,
        'probe': format_mixture(cfg.probe_mixture),
        'ancilla': format_mixture(cfg.ancilla_mixture),
        'probe_loss': cfg.probe_loss,
        'ancilla_loss': cfg.ancilla_loss,
        'n_events': cfg.n_events,
        'seed': cfg.seed,
    }


def quadrature_report(cfg: RunConfig) -> EstimationReport:
    """
    确定性求积报告（曲线的快速路径）

    Args:
        cfg: 实验配置（n_events 与 seed 仅作回显）

    Returns:
        EstimationReport
    """
    v_prime, select_prob = expected_error_quadrature(cfg.prior, cfg.kernel(), cfg.r)
    limit = classical_limit(cfg.v, cfg.r)
    return EstimationReport(config_echo(cfg), 'quadrature', v_prime, 0.0, limit.v_prime_c,
                            select_prob, 0)


def montecarlo_report(cfg: RunConfig, events: Sequence[EventRecord],
                      v: Optional[float] = None) -> EstimationReport:
    """
    由事件列表生成蒙特卡罗报告

    Args:
        cfg: 实验配置
        events: 事件列表
        v: 事件对应的先验方差（重定向后与 cfg.v 不同）

    Returns:
        EstimationReport

    Raises:
        NoEventsError: 没有被选中的事件
    """
    v = cfg.v if v is None else v
    estimate = estimation_error(events)
    limit = classical_limit(v, cfg.r if cfg.r > 0 else 1.0)
    echo = config_echo(cfg)
    echo.update({'v': v, 'n_events': len(events)})
    select_prob = sum(1 for e in events if e.selected) / len(events) if events else math.nan
    return EstimationReport(echo, 'montecarlo', estimate.v_prime, estimate.stderr,
                            limit.v_prime_c, select_prob, estimate.n_selected)
