#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
单光子位移估计 - 命令行入口
Single-Photon Displacement Estimation - Command Line Entry Point

子命令:
    simulate  运行蒙特卡罗实验，写出事件与报告
    sweep     沿 v / r / 损耗扫描 v'/v'_C（求积，可选蒙特卡罗列）
    profile   无位移时测量结果分布的径向剖面与二维分布
    analyze   读取事件文件重新后选择、估计、可选方差重定向

退出码: 0 成功，2 配置/用法错误，3 后选择退化或没有事件，1 其他错误
"""

import argparse
import os
import sys
from typing import List, Optional

# 添加项目路径到系统路径
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from src import __version__
from src.data_export import DataExporter
from src.data_import import read_events
from src.errors import (CapabilityError, ConfigError, DegenerateSelectionError, DomainError,
                        NoEventsError, UnsupportedDirectionError)
from src.logger import configure, get_logger
from src.montecarlo import reanalyze, retarget_variance, run_experiment, substream
from src.outcome_profile import grid_table, radial_table
from src.report import montecarlo_report
from src.estimation import PriorModel, build_likelihood
from src.sweep import (RETARGET_STREAM, SWEEP_COLUMNS, SweepSpec, locate_crossing, run_sweep,
                       sweep_rows_as_dicts)
from src.utils import build_run_config, load_config, parse_float_list, parse_mixture
from src.wigner_core import apply_loss

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DEGENERATE = 3


class DisplacementEstimationApp:
    """命令行应用主类"""

    def __init__(self, args: argparse.Namespace):
        """
        初始化应用

        Args:
            args: 解析后的命令行参数
        """
        self.args = args
        self.config = load_config(args.config)

        system = self.config.get('System', {})
        configure(system.get('log_dir', 'logs'), system.get('console_level', 'INFO'))
        self.logger = get_logger("Main")

        output_dir = args.out or system.get('output_dir', 'results')
        self.exporter = DataExporter(output_dir)
        self.workers = int(self.config['Experiment'].get('workers', 1))
        self.logger.info("配置加载成功: %s, 输出目录: %s", args.config, output_dir)

    def run_config(self):
        """由 [Experiment] 节和命令行覆盖项构造 RunConfig"""
        return build_run_config(
            self.config['Experiment'],
            seed=self.args.seed,
            v=getattr(self.args, 'v', None),
            r=getattr(self.args, 'r', None),
        )

    def cmd_simulate(self) -> int:
        """运行实验并写出事件与报告"""
        cfg = self.run_config()
        print(f"\n[1/3] 运行实验: v={cfg.v} r={cfg.r} 事件数={cfg.n_events}")
        events = run_experiment(cfg, workers=self.workers)

        print("\n[2/3] 计算估计误差...")
        report = montecarlo_report(cfg, events)

        print("\n[3/3] 写出结果...")
        self.exporter.export_events(events)
        self.exporter.export_report_json(report)
        self.exporter.export_reports_csv([report])

        self._print_report(report)
        return EXIT_OK

    def cmd_sweep(self) -> int:
        """沿一个轴扫描 v'/v'_C"""
        section = self.config.get('Sweep', {})
        template = self.run_config()
        spec = SweepSpec(str(section.get('axis', 'prior_variance')),
                         tuple(parse_float_list(section.get('values'))), template)
        mc = self.args.mc if self.args.mc is not None else int(section.get('mc', 0) or 0)
        retarget_from = section.get('retarget_from') or None
        if retarget_from is not None:
            retarget_from = float(retarget_from)

        print(f"\n[1/2] 扫描 {spec.axis}: {list(spec.values)} (mc={mc})")
        rows = run_sweep(spec, mc=mc, workers=self.workers, retarget_from=retarget_from)

        print("\n[2/2] 写出结果...")
        self.exporter.export_table(sweep_rows_as_dicts(rows), SWEEP_COLUMNS, 'sweep.csv')
        for row in rows:
            line = f"  {spec.axis}={row.value:<8g} v'/v'_C={row.quadrature.ratio:.5f}"
            if row.montecarlo is not None:
                line += f"  MC={row.montecarlo.ratio:.5f}±{row.montecarlo.ratio_stderr:.5f}"
            print(line)

        if self.args.crossing:
            lo, hi = self.args.crossing
            crossing = locate_crossing(spec.axis, template, lo, hi)
            print(f"\n  v'/v'_C = 1 交叉点: {spec.axis} = {crossing:.4f}")
        return EXIT_OK

    def cmd_profile(self) -> int:
        """无位移时测量结果分布（v = 0，不做估计）"""
        experiment = self.config['Experiment']
        section = self.config.get('Profile', {})
        probe = apply_loss(parse_mixture(experiment['probe']), float(experiment.get('probe_loss', 0.0)))
        ancilla = apply_loss(parse_mixture(experiment['ancilla']),
                             float(experiment.get('ancilla_loss', 0.0)))
        kernel = build_likelihood(probe, ancilla)
        seed = self.args.seed if self.args.seed is not None else int(experiment['seed'])
        n_events = int(section.get('n_events', 200000))

        print(f"\n[1/2] 径向剖面与直方图: 事件数={n_events}")
        rows = radial_table(kernel, float(section.get('r_max', 3.0)), int(section.get('bins', 30)),
                            n_events, seed)
        grid = grid_table(kernel, float(section.get('grid_extent', 3.0)),
                          float(section.get('grid_step', 0.1)), n_events, seed)

        print("\n[2/2] 写出结果...")
        self.exporter.export_profile(rows)
        self.exporter.export_grid(grid)
        for row in rows:
            print(f"  r={row['radius']:.3f}  model={row['model_density']:.5f}  "
                  f"mc={row['mc_density']:.5f}±{row['mc_stderr']:.5f}")
        return EXIT_OK

    def cmd_analyze(self) -> int:
        """重新分析事件文件"""
        if not self.args.events:
            raise ConfigError("analyze 需要 --events PATH")
        cfg = build_run_config(self.config['Experiment'], r=self.args.r, seed=self.args.seed)
        v_target = self.args.v if self.args.v is not None else cfg.v
        kernel = cfg.kernel()

        print(f"\n[1/3] 读取事件: {self.args.events}")
        events = read_events(self.args.events)

        if v_target != cfg.v:
            print(f"\n[2/3] 方差重定向 {cfg.v} -> {v_target}，后选择 r={cfg.r}")
            events = retarget_variance(events, cfg.v, v_target,
                                       substream(cfg.seed, RETARGET_STREAM), kernel)
        else:
            print(f"\n[2/3] 后选择 r={cfg.r}")
        events = reanalyze(events, PriorModel(v_target), kernel, cfg.r)

        print("\n[3/3] 计算估计误差...")
        report = montecarlo_report(cfg, events, v=v_target)
        self.exporter.export_report_json(report, 'analysis.json',
                                         extra={'events_file': self.args.events})
        self.exporter.export_reports_csv([report], 'analysis.csv')
        self._print_report(report)
        return EXIT_OK

    def _print_report(self, report):
        print("\n" + "=" * 60)
        print(f"  v' = {report.v_prime:.6f} ± {report.v_prime_stderr:.6f}")
        print(f"  v'_C = {report.v_prime_c:.6f}")
        print(f"  v'/v'_C = {report.ratio:.5f} ± {report.ratio_stderr:.5f}")
        print(f"  选择概率 = {report.select_prob:.5f} ({report.n_selected} 个事件)")
        print("=" * 60)

    def run(self) -> int:
        """执行子命令"""
        commands = {
            'simulate': self.cmd_simulate,
            'sweep': self.cmd_sweep,
            'profile': self.cmd_profile,
            'analyze': self.cmd_analyze,
        }
        return commands[self.args.command]()


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="disp-est",
        description="单光子双零差位移估计模拟 (single-photon displacement estimation)")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest='command', required=True)

    def common(p):
        p.add_argument('--config', required=True, help="INI 配置文件")
        p.add_argument('--out', help="输出目录")
        p.add_argument('--seed', type=int, help="64位随机种子")
        return p

    simulate = common(sub.add_parser('simulate', help="运行蒙特卡罗实验"))
    simulate.add_argument('--v', type=float, help="先验方差")
    simulate.add_argument('--r', type=float, help="后选择半径")

    sweep = common(sub.add_parser('sweep', help="参数扫描"))
    sweep.add_argument('--mc', type=int, help="每行蒙特卡罗事件数")
    sweep.add_argument('--crossing', type=float, nargs=2, metavar=('LO', 'HI'),
                       help="在区间内求 v'/v'_C = 1 的位置")

    common(sub.add_parser('profile', help="无位移时的结果分布"))

    analyze = common(sub.add_parser('analyze', help="重新分析事件文件"))
    analyze.add_argument('--events', help="事件CSV文件")
    analyze.add_argument('--v', type=float, help="目标先验方差（小于配置值时做方差重定向）")
    analyze.add_argument('--r', type=float, help="后选择半径")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    args = build_parser().parse_args(argv)
    logger = None

    try:
        app = DisplacementEstimationApp(args)
        logger = app.logger
        return app.run()

    except KeyboardInterrupt:
        print("\n[信息] 用户中断")
        return EXIT_FAILURE

    except (ConfigError, DomainError, CapabilityError, UnsupportedDirectionError) as e:
        print(f"\n[错误] 配置或参数错误: {e}", file=sys.stderr)
        if logger:
            logger.error("配置或参数错误: %s", e)
        return EXIT_USAGE

    except (DegenerateSelectionError, NoEventsError) as e:
        print(f"\n[错误] 后选择退化: {e}", file=sys.stderr)
        if logger:
            logger.error("后选择退化: %s", e)
        return EXIT_DEGENERATE

    except Exception as e:
        print(f"\n[错误] 运行失败: {e}", file=sys.stderr)
        if logger:
            logger.exception("运行失败")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
