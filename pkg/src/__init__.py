"""
单光子位移估计 - 核心模块
Single-Photon Displacement Estimation - Core Modules
"""

__version__ = "1.1.1"

# 版本更新日志
# v1.1.1
# - 重定向扫描：高于源方差的取值只保留求积列
# - 每块固定抽样数，同一种子的事件前缀稳定
#
# v1.1.0
# - 方差重定向：一次实验得到多个先验方差的蒙特卡罗列
# - v'/v'_C = 1 交叉点求解（brentq）
# - 二维结果分布网格、两臂损耗配置
#
# v1.0.0
# - Wigner 函数闭式卷积、似然核、后验均值估计
# - 确定性求积与蒙特卡罗两条路径
# - simulate / sweep / profile / analyze 命令行
