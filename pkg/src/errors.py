#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
异常模块
Errors Module - 全部模块共用的异常层次，命令行据此映射退出码
"""


class EstimationError(Exception):
    """位移估计库的基础异常"""


class DomainError(EstimationError, ValueError):
    """参数超出定义域（损耗不在[0,1]、半径为负、v ≤ 0、混合权重非法等）"""


class CapabilityError(EstimationError):
    """超出实现能力（光子数或多项式次数过高）"""


class DegeneratePosteriorError(EstimationError):
    """后验退化：证据下溢或非正"""


class DegenerateSelectionError(EstimationError):
    """后选择概率过小，结果无意义"""


class NoEventsError(EstimationError):
    """没有被选中的事件"""


class UnsupportedDirectionError(EstimationError, ValueError):
    """方差重定向只支持向下（v_target ≤ v_source）"""


class EnvelopeError(EstimationError):
    """拒绝采样的包络无法覆盖核函数"""


class ConfigError(EstimationError):
    """配置文件、扫描文件或事件文件格式错误"""
