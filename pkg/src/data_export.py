#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
数据导出模块
Data Export Module - 导出事件、报告、剖面为CSV/JSON格式
"""

import csv
import json
import os
from datetime import datetime
from typing import Any, Dict, Iterable, List, Optional, Sequence

from src.logger import get_logger
from src.montecarlo import EventRecord
from src.report import REPORT_COLUMNS, EstimationReport

EVENT_COLUMNS = ['xi', 'eta', 'y_x', 'y_p', 'selected', 'est_xi', 'est_eta', 'sq_err']
PROFILE_COLUMNS = ['radius_lo', 'radius_hi', 'radius', 'model_density', 'mc_density', 'mc_stderr']
GRID_COLUMNS = ['y_x', 'y_p', 'model_density', 'mc_density']
FORMAT_VERSION = '1.0'


def format_float(value: float) -> str:
    """17位有效数字，读回逐位一致"""
    return format(float(value), '.17g')


def _format_cell(value: Any) -> Any:
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, float):
        return format_float(value)
    return value


class DataExporter:
    """数据导出器"""

    def __init__(self, output_dir: str):
        """
        初始化导出器

        Args:
            output_dir: 输出目录
        """
        self.output_dir = output_dir
        self.logger = get_logger("DataExport")
        os.makedirs(output_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def export_events(self, events: Iterable[EventRecord], name: str = 'events.csv') -> str:
        """
        导出事件为CSV

        Args:
            events: 事件列表
            name: 文件名

        Returns:
            文件路径
        """
        file_path = self.path(name)
        count = 0
        with open(file_path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f)
            writer.writerow(EVENT_COLUMNS)
            for e in events:
                writer.writerow([
                    format_float(e.xi), format_float(e.eta),
                    format_float(e.y_x), format_float(e.y_p),
                    int(e.selected),
                    format_float(e.est_xi), format_float(e.est_eta), format_float(e.sq_err),
                ])
                count += 1

        self.logger.info("事件导出成功: %s (%d 条)", file_path, count)
        return file_path

    def export_report_json(self, report: EstimationReport, name: str = 'report.json',
                           extra: Optional[Dict[str, Any]] = None) -> str:
        """
        导出报告为JSON

        Args:
            report: 估计报告
            name: 文件名
            extra: 附加字段

        Returns:
            文件路径
        """
        file_path = self.path(name)
        row = report.as_row()
        data = {
            'version': FORMAT_VERSION,
            'export_time': datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
            'config': report.config,
            'report': {k: v for k, v in row.items() if k not in report.config},
        }
        if extra:
            data.update(extra)

        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2)

        self.logger.info("报告导出成功: %s", file_path)
        return file_path

    def export_table(self, rows: Sequence[Dict[str, Any]], columns: List[str], name: str) -> str:
        """
        导出表格为CSV

        Args:
            rows: 行字典列表
            columns: 列顺序
            name: 文件名

        Returns:
            文件路径
        """
        file_path = self.path(name)
        with open(file_path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.DictWriter(f, fieldnames=columns, extrasaction='ignore')
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _format_cell(row.get(k, '')) for k in columns})

        self.logger.info("表格导出成功: %s (%d 行)", file_path, len(rows))
        return file_path

    def export_reports_csv(self, reports: Sequence[EstimationReport], name: str = 'report.csv') -> str:
        """导出报告为CSV（每个报告一行）"""
        return self.export_table([r.as_row() for r in reports], REPORT_COLUMNS, name)

    def export_profile(self, rows: Sequence[Dict[str, float]], name: str = 'profile.csv') -> str:
        """导出径向剖面"""
        return self.export_table(rows, PROFILE_COLUMNS, name)

    def export_grid(self, rows: Sequence[Dict[str, float]], name: str = 'profile_grid.csv') -> str:
        """导出二维结果分布"""
        return self.export_table(rows, GRID_COLUMNS, name)
