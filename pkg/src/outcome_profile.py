#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
结果分布模块
Outcome Profile Module - 无位移 (v = 0) 时测量结果分布 p(y|0,0) 的径向剖面与二维分布，附蒙特卡罗直方图
"""

import math
from typing import Dict, List

import numpy as np

from src.errors import DomainError
from src.estimation import SQRT2, LikelihoodKernel
from src.logger import get_logger
from src.montecarlo import OutcomeSampler, substream
from src.wigner_core import radial_profile

logger = get_logger("Profile")

# 每个环带内的 Gauss-Legendre 节点数
ANNULUS_NODES = 32


def outcome_density(kernel: LikelihoodKernel, radii) -> np.ndarray:
    """
    p(y|0,0) 在 |y| = ρ 处的值: 2·K(2ρ²)

    Args:
        kernel: 似然核
        radii: 结果空间半径

    Returns:
        密度数组
    """
    scaled = [SQRT2 * float(rho) for rho in radii]
    return 2.0 * np.array([value for _, value in radial_profile(kernel.kernel, scaled)])


def sample_zero_displacement(kernel: LikelihoodKernel, n_events: int, seed: int):
    """无位移时抽取 n_events 个测量结果"""
    if n_events < 1:
        raise DomainError(f"事件数必须 ≥ 1: {n_events}")
    ux, up = OutcomeSampler(kernel).sample_u(substream(seed, 0), n_events)
    return ux / SQRT2, up / SQRT2


def annulus_mean_density(kernel: LikelihoodKernel, lo: float, hi: float) -> float:
    """环带 [lo, hi) 上 p(y|0,0) 的平均值"""
    nodes, weights = np.polynomial.legendre.leggauss(ANNULUS_NODES)
    rho = lo + 0.5 * (hi - lo) * (nodes + 1.0)
    mass = 0.5 * (hi - lo) * np.dot(weights, 2.0 * math.pi * rho * outcome_density(kernel, rho))
    return float(mass / (math.pi * (hi * hi - lo * lo)))


def radial_table(kernel: LikelihoodKernel, r_max: float, bins: int, n_events: int,
                 seed: int) -> List[Dict[str, float]]:
    """
    径向剖面表：模型环带平均密度与蒙特卡罗直方图密度

    Args:
        kernel: 似然核
        r_max: 最大半径
        bins: 环带数
        n_events: 抽样数
        seed: 种子

    Returns:
        行字典列表
    """
    if not (r_max > 0 and bins >= 1):
        raise DomainError(f"剖面参数非法: r_max={r_max}, bins={bins}")
    y_x, y_p = sample_zero_displacement(kernel, n_events, seed)
    edges = np.linspace(0.0, r_max, bins + 1)
    counts, _ = np.histogram(np.hypot(y_x, y_p), bins=edges)

    rows = []
    for lo, hi, count in zip(edges[:-1], edges[1:], counts):
        area = math.pi * (hi * hi - lo * lo)
        rows.append({
            'radius_lo': float(lo),
            'radius_hi': float(hi),
            'radius': float(0.5 * (lo + hi)),
            'model_density': annulus_mean_density(kernel, lo, hi),
            'mc_density': float(count / (n_events * area)),
            'mc_stderr': float(math.sqrt(count) / (n_events * area)),
        })
    logger.info("径向剖面: %d 个环带, %d 个事件", bins, n_events)
    return rows


def grid_table(kernel: LikelihoodKernel, extent: float, step: float, n_events: int,
               seed: int) -> List[Dict[str, float]]:
    """
    二维结果分布表：格点中心的模型密度与二维直方图密度
    """
    if not (extent > 0 and step > 0):
        raise DomainError(f"网格参数非法: extent={extent}, step={step}")
    n_cells = max(1, int(round(2 * extent / step)))
    edges = np.linspace(-extent, extent, n_cells + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    y_x, y_p = sample_zero_displacement(kernel, n_events, seed)
    counts, _, _ = np.histogram2d(y_x, y_p, bins=[edges, edges])
    cell = (edges[1] - edges[0]) ** 2

    gx, gp = np.meshgrid(centers, centers, indexing='ij')
    model = 2.0 * kernel.kernel.at_s(2.0 * (gx * gx + gp * gp))
    rows = []
    for i, x in enumerate(centers):
        for j, p in enumerate(centers):
            rows.append({
                'y_x': float(x), 'y_p': float(p),
                'model_density': float(model[i, j]),
                'mc_density': float(counts[i, j] / (n_events * cell)),
            })
    return rows
