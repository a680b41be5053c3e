#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
工具函数模块
Utils Module - 配置文件加载、取值解析、光子数分布字符串转换
"""

import configparser
import os
from typing import Any, Dict, List, Mapping

from src.errors import ConfigError, DomainError
from src.montecarlo import RunConfig
from src.wigner_core import PhotonMixture

DEFAULT_SECTION = "Experiment"


def get_default_config() -> Dict[str, Dict[str, Any]]:
    """
    获取默认配置

    Returns:
        默认配置字典
    """
    return {
        'Experiment': {
            'v': 0.34,
            'r': 0.2,
            'probe': '0:0.25,1:0.73,2:0.02',
            'ancilla': '0:0.25,1:0.73,2:0.02',
            'probe_loss': 0.0,
            'ancilla_loss': 0.0,
            'n_events': 168917,
            'seed': 20240101,
            'workers': 1,
        },
        'Profile': {
            'r_max': 3.0,
            'bins': 30,
            'n_events': 200000,
            'grid_extent': 3.0,
            'grid_step': 0.1,
        },
        'Sweep': {
            'axis': 'prior_variance',
            'values': '0.13, 0.34, 0.8, 1.2',
            'retarget_from': '',
            'mc': 0,
        },
        'System': {
            'log_dir': 'logs',
            'console_level': 'INFO',
            'output_dir': 'results',
        },
    }


def parse_value(value: str) -> Any:
    """
    解析配置值类型

    Args:
        value: 字符串值

    Returns:
        解析后的值（布尔、整数、浮点数或原字符串）
    """
    text = value.strip()

    # 布尔值（不把 "1"/"0" 当布尔，事件数和种子需要它们）
    if text.lower() in ('true', 'yes', 'on'):
        return True
    if text.lower() in ('false', 'no', 'off'):
        return False

    # 数字
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass

    # 字符串
    return text


def load_config(config_path: str) -> Dict[str, Dict[str, Any]]:
    """
    加载配置文件并覆盖在默认配置之上

    没有节标题的纯键值文件按 [Experiment] 节读取。

    Args:
        config_path: 配置文件路径

    Returns:
        配置字典

    Raises:
        ConfigError: 文件不存在或无法解析
    """
    if not os.path.exists(config_path):
        raise ConfigError(f"配置文件不存在: {config_path}")

    with open(config_path, 'r', encoding='utf-8') as f:
        text = f.read()

    config = configparser.ConfigParser()
    try:
        try:
            config.read_string(text, source=config_path)
        except configparser.MissingSectionHeaderError:
            config = configparser.ConfigParser()
            config.read_string(f"[{DEFAULT_SECTION}]\n" + text, source=config_path)
    except configparser.Error as e:
        raise ConfigError(f"配置文件解析失败 {config_path}: {e}") from e

    config_dict = get_default_config()
    for section in config.sections():
        options = config_dict.setdefault(section, {})
        for key, value in config.items(section):
            options[key] = parse_value(value)

    return config_dict


def parse_mixture(text: Any) -> PhotonMixture:
    """
    解析光子数分布字符串 "0:0.25,1:0.73,2:0.02"

    Args:
        text: 分布字符串（单个整数表示纯 Fock 态）

    Returns:
        PhotonMixture

    Raises:
        ConfigError: 格式错误或概率不合法
    """
    if isinstance(text, int) and not isinstance(text, bool):
        text = f"{text}:1"
    weights: Dict[int, float] = {}
    try:
        for item in str(text).split(','):
            item = item.strip()
            if not item:
                continue
            n, p = item.split(':')
            n = int(n)
            if n in weights:
                raise ConfigError(f"光子数重复: {n}")
            weights[n] = float(p)
        return PhotonMixture.from_dict(weights)
    except (ValueError, DomainError) as e:
        raise ConfigError(f"无法解析光子数分布 '{text}': {e}") from e


def format_mixture(mix: PhotonMixture) -> str:
    """光子数分布转为字符串（parse_mixture 的逆）"""
    return ','.join(f"{n}:{p!r}" for n, p in mix.weights)


def parse_float_list(text: Any) -> List[float]:
    """
    解析逗号分隔的浮点数列表

    Raises:
        ConfigError: 无法解析或为空
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return [float(text)]
    try:
        values = [float(item) for item in str(text).split(',') if item.strip()]
    except ValueError as e:
        raise ConfigError(f"无法解析数值列表 '{text}': {e}") from e
    if not values:
        raise ConfigError("数值列表不能为空")
    return values


def build_run_config(section: Mapping[str, Any], **overrides: Any) -> RunConfig:
    """
    由 [Experiment] 配置节构造并校验 RunConfig

    Args:
        section: 配置节
        overrides: 覆盖项（命令行参数），值为 None 时忽略

    Returns:
        RunConfig

    Raises:
        ConfigError: 缺少键或取值不合法
    """
    values = dict(section)
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        n_events = values['n_events']
        if isinstance(n_events, bool) or not isinstance(n_events, int):
            raise ConfigError(f"n_events 必须是整数: {n_events!r}")
        return RunConfig(
            v=float(values['v']),
            r=float(values['r']),
            probe_mixture=parse_mixture(values['probe']),
            ancilla_mixture=parse_mixture(values['ancilla']),
            n_events=n_events,
            seed=int(values['seed']),
            probe_loss=float(values.get('probe_loss', 0.0)),
            ancilla_loss=float(values.get('ancilla_loss', 0.0)),
        )
    except KeyError as e:
        raise ConfigError(f"配置缺少键: {e}") from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"配置取值不合法: {e}") from e
