#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
日志系统模块
Logger Module - 统一的日志管理
"""

import logging
import os
from datetime import datetime
from logging.handlers import RotatingFileHandler
from typing import Optional

ROOT_LOGGER_NAME = "DispEst"


class Logger:
    """日志管理器"""

    _instance = None
    _initialized = False

    def __new__(cls):
        """单例模式"""
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self):
        """初始化日志系统"""
        if self._initialized:
            return

        self._initialized = True

        self.logger = logging.getLogger(ROOT_LOGGER_NAME)
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False
        self.file_handler = None
        self.console_handler = None

        # 避免重复添加处理器
        if self.logger.handlers:
            return

        # 日志格式
        self.detailed_formatter = logging.Formatter(
            '[%(asctime)s] [%(name)s] [%(levelname)s] %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        simple_formatter = logging.Formatter(
            '[%(name)s] [%(levelname)s] %(message)s'
        )

        # 控制台处理器
        self.console_handler = logging.StreamHandler()
        self.console_handler.setLevel(logging.INFO)
        self.console_handler.setFormatter(simple_formatter)
        self.logger.addHandler(self.console_handler)

        self.attach_file_handler("logs")

    def attach_file_handler(self, log_dir: str):
        """
        (重新)挂载轮转文件处理器

        Args:
            log_dir: 日志目录
        """
        if self.file_handler is not None:
            self.logger.removeHandler(self.file_handler)
            self.file_handler.close()

        # 确保日志目录存在
        os.makedirs(log_dir, exist_ok=True)
        log_file = os.path.join(log_dir, f"disp_est_{datetime.now().strftime('%Y%m%d')}.log")

        self.file_handler = RotatingFileHandler(
            log_file,
            maxBytes=5*1024*1024,  # 5MB
            backupCount=5,
            encoding='utf-8'
        )
        self.file_handler.setLevel(logging.DEBUG)
        self.file_handler.setFormatter(self.detailed_formatter)
        self.logger.addHandler(self.file_handler)

        self.logger.debug("日志文件: %s", log_file)

    def get_logger(self, name: Optional[str] = None) -> logging.Logger:
        """
        获取日志器

        Args:
            name: 日志器名称

        Returns:
            Logger对象
        """
        if name:
            return logging.getLogger(f"{ROOT_LOGGER_NAME}.{name}")
        return self.logger


# 全局日志器实例
_logger_instance = None


def _instance() -> Logger:
    global _logger_instance
    if _logger_instance is None:
        _logger_instance = Logger()
    return _logger_instance


def configure(log_dir: str = "logs", console_level: str = "INFO") -> None:
    """
    按 [System] 配置段调整日志目录和控制台级别

    Args:
        log_dir: 日志目录
        console_level: 控制台日志级别名称，如 "INFO"、"WARNING"
    """
    level = logging.getLevelName(str(console_level).upper())
    if not isinstance(level, int):
        level = logging.INFO

    inst = _instance()
    if inst.console_handler is not None:
        inst.console_handler.setLevel(level)
    if inst.file_handler is not None and \
            os.path.dirname(inst.file_handler.baseFilename) != os.path.abspath(log_dir):
        inst.attach_file_handler(log_dir)


def get_logger(name: Optional[str] = None) -> logging.Logger:
    """
    获取全局日志器

    Args:
        name: 模块名称

    Returns:
        Logger对象
    """
    return _instance().get_logger(name)
