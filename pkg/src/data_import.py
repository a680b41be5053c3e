#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
数据导入模块
Data Import Module - 从CSV读回事件记录
"""

import csv
import os
from typing import List

from src.data_export import EVENT_COLUMNS
from src.errors import ConfigError
from src.logger import get_logger
from src.montecarlo import EventRecord

logger = get_logger("DataImport")


def read_events(file_path: str) -> List[EventRecord]:
    """
    从CSV读取事件

    Args:
        file_path: 事件文件路径

    Returns:
        EventRecord 列表

    Raises:
        ConfigError: 文件不存在、表头不匹配或数值无法解析
    """
    if not os.path.exists(file_path):
        raise ConfigError(f"事件文件不存在: {file_path}")

    events = []
    with open(file_path, 'r', newline='', encoding='utf-8') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != EVENT_COLUMNS:
            raise ConfigError(f"事件文件表头不匹配: {header}，应为 {','.join(EVENT_COLUMNS)}")

        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(EVENT_COLUMNS):
                raise ConfigError(f"{file_path}:{line_no} 列数为 {len(row)}，应为 {len(EVENT_COLUMNS)}")
            try:
                xi, eta, y_x, y_p = (float(v) for v in row[:4])
                if row[4] not in ('0', '1'):
                    raise ValueError(f"selected 必须是 0 或 1: {row[4]!r}")
                est_xi, est_eta, sq_err = (float(v) for v in row[5:])
            except ValueError as e:
                raise ConfigError(f"{file_path}:{line_no} 无法解析: {e}") from e
            events.append(EventRecord(xi, eta, y_x, y_p, row[4] == '1', est_xi, est_eta, sq_err))

    logger.info("读取事件: %s (%d 条)", file_path, len(events))
    return events
