import argparse
import os
import platform
import sys
import tempfile
import traceback
from pathlib import Path
from types import TracebackType
from typing import Any, Callable, NoReturn, Sequence

import pydantic

from pwt.omniwheg import __title__, __version__, core, log
from pwt.omniwheg.config import Log, Scenario
from pwt.omniwheg.constants import (
    EXIT_CLIMB_FAILED,
    EXIT_ERROR,
    EXIT_SUCCESS,
    HELP_URL,
    LOG_LEVEL_DEFAULT,
    LOG_LEVEL_OPTIONS,
    LOG_LEVEL_VERBOSE,
    LOG_OUTPUT_FORMAT_OPTIONS,
    LOG_OUTPUT_OPTIONS,
    LOG_ROOT_NAME,
    OBSTACLE_DIRECTION_OPTIONS,
    OUTPUT_DIR_DEFAULT,
    PARAMS_TORQUE_CONSTANT_DEFAULT,
    RUN_SLIP_DEFAULT,
    SWEEP_HEIGHTS_DEFAULT,
    SWEEP_WORKERS_DEFAULT,
)
from pwt.omniwheg.errors import OmniWhegError
from pwt.omniwheg.message import (
    MSG_CMD_ALIGN,
    MSG_CMD_ANALYZE,
    MSG_CMD_FEASIBILITY,
    MSG_CMD_RUN,
    MSG_CMD_SWEEP,
    MSG_DALPHA,
    MSG_DESCRIPTION,
    MSG_DIRECTIONS,
    MSG_EPILOG,
    MSG_ERROR,
    MSG_HEIGHTS,
    MSG_HELP,
    MSG_LOG_CSV,
    MSG_LOG_FORMAT,
    MSG_LOG_LEVEL,
    MSG_LOG_OUTPUT,
    MSG_OUT_DIR,
    MSG_SCENARIO_FILE,
    MSG_SEED,
    MSG_SIGINT,
    MSG_SLIP,
    MSG_STARTED,
    MSG_TORQUE_CONSTANT,
    MSG_TRACEBACK,
    MSG_VERBOSE,
    MSG_VERSION,
    MSG_WORKERS,
)
from pwt.omniwheg.scenario import load_scenario
from pwt.omniwheg.utils import casefold_in_list, split_to_list

# 初始化根日志实例
root_logger = log.get_standard_logger(LOG_ROOT_NAME)

# 操作员错误, 统一以 EXIT_ERROR 退出
OPERATOR_ERRORS = (OmniWhegError, pydantic.ValidationError, OSError, ValueError)


def global_exception_handler(
    exc_type: type[BaseException],
    exc_value: BaseException,
    exc_traceback: TracebackType | None,
) -> None:
    """
    全局异常处理函数, 用于捕获并处理程序中的异常.

    参数:
        exc_type: 异常类型.
        exc_value: 异常实例.
        exc_traceback: 异常的回溯信息.
    """

    if exc_type is KeyboardInterrupt:
        root_logger.info(MSG_SIGINT)
    else:
        fd, path = tempfile.mkstemp(prefix="traceback-", suffix=".log", text=True)
        with os.fdopen(fd, mode="w") as file:
            traceback.print_exception(exc_type, exc_value, exc_traceback, file=file)
        root_logger.critical(MSG_TRACEBACK, extra=dict(path=path), exc_info=exc_value)


class _ArgumentParser(argparse.ArgumentParser):
    """用法错误记入日志, 并以操作员错误的退出码退出."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        root_logger.critical(MSG_ERROR, extra=dict(exception=message))
        raise SystemExit(EXIT_ERROR)


def _float_list(value: str) -> list[float]:
    try:
        return [float(item) for item in split_to_list(value, sep=",") or []]
    except ValueError as ex:
        raise argparse.ArgumentTypeError(f"invalid number list {value!r}") from ex


def _direction_list(value: str) -> list[str]:
    directions = []
    for item in split_to_list(value, sep=",") or []:
        direction = casefold_in_list(item, OBSTACLE_DIRECTION_OPTIONS)
        if direction is None:
            raise argparse.ArgumentTypeError(f"invalid direction {item!r}")
        directions.append(direction)
    return directions


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """
    解析命令行参数并返回一个包含解析结果的命名空间对象.

    参数:
        argv: 命令行参数, 默认为 sys.argv[1:].

    返回:
        包含解析后的命令行参数的命名空间对象.
    """

    return _get_parser().parse_args(argv)


def _get_parser() -> argparse.ArgumentParser:
    """
    创建并返回一个命令行参数解析器.

    返回:
        一个配置好的命令行参数解析器.
    """

    parser = _ArgumentParser(
        prog="omniwheg",
        description=MSG_DESCRIPTION,
        epilog=MSG_EPILOG.format(url=HELP_URL),
        add_help=False,
    )
    log_config_group = parser.add_argument_group("Log Configuration")
    log_config_group.add_argument(
        "--log-level",
        help=MSG_LOG_LEVEL.format(default=LOG_LEVEL_DEFAULT),
        dest="log_level",
        type=str.upper,
        choices=LOG_LEVEL_OPTIONS,
    )
    log_config_group.add_argument(
        "--log-output",
        help=MSG_LOG_OUTPUT.format(options=", ".join(LOG_OUTPUT_OPTIONS)),
    )
    log_config_group.add_argument(
        "--log-format",
        help=MSG_LOG_FORMAT.format(options=", ".join(LOG_OUTPUT_FORMAT_OPTIONS)),
        type=str.lower,
        choices=LOG_OUTPUT_FORMAT_OPTIONS,
    )
    general_group = parser.add_argument_group("General Options")
    general_group.add_argument(
        "--verbose",
        "-v",
        help=MSG_VERBOSE.format(level=LOG_LEVEL_VERBOSE),
        dest="log_level",
        action="store_const",
        const=LOG_LEVEL_VERBOSE,
    )
    general_group.add_argument(
        "--version",
        "-V",
        help=MSG_VERSION,
        action="version",
        version=f"{__title__} {__version__}",
    )
    general_group.add_argument(
        "--help",
        "-h",
        help=MSG_HELP,
        action="help",
    )

    output = _ArgumentParser(add_help=False)
    output.add_argument(
        "--out",
        metavar="DIR",
        help=MSG_OUT_DIR.format(default=OUTPUT_DIR_DEFAULT),
    )
    simulation = _ArgumentParser(add_help=False, parents=[output])
    simulation.add_argument("--seed", type=int, help=MSG_SEED)
    simulation.add_argument("--dalpha", type=float, help=MSG_DALPHA)

    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    run = commands.add_parser("run", help=MSG_CMD_RUN, parents=[simulation])
    run.add_argument("scenario", metavar="SCENARIO", help=MSG_SCENARIO_FILE)
    run.set_defaults(handler=command_run)

    sweep = commands.add_parser("sweep", help=MSG_CMD_SWEEP, parents=[simulation])
    sweep.add_argument("scenario", metavar="SCENARIO", help=MSG_SCENARIO_FILE)
    sweep.add_argument(
        "--heights",
        type=_float_list,
        default=list(SWEEP_HEIGHTS_DEFAULT),
        help=MSG_HEIGHTS.format(default=",".join(map(str, SWEEP_HEIGHTS_DEFAULT))),
    )
    sweep.add_argument(
        "--directions",
        type=_direction_list,
        default=list(OBSTACLE_DIRECTION_OPTIONS),
        help=MSG_DIRECTIONS,
    )
    sweep.add_argument(
        "--workers",
        type=int,
        default=SWEEP_WORKERS_DEFAULT,
        help=MSG_WORKERS.format(default=SWEEP_WORKERS_DEFAULT),
    )
    sweep.set_defaults(handler=command_sweep)

    analyze = commands.add_parser("analyze", help=MSG_CMD_ANALYZE, parents=[output])
    analyze.add_argument("log_csv", metavar="LOG_CSV", help=MSG_LOG_CSV)
    analyze.add_argument(
        "--torque-constant",
        type=float,
        default=PARAMS_TORQUE_CONSTANT_DEFAULT,
        help=MSG_TORQUE_CONSTANT.format(default=PARAMS_TORQUE_CONSTANT_DEFAULT),
    )
    analyze.set_defaults(handler=command_analyze)

    feasibility = commands.add_parser(
        "feasibility", help=MSG_CMD_FEASIBILITY, parents=[simulation]
    )
    feasibility.add_argument("scenario", metavar="SCENARIO", help=MSG_SCENARIO_FILE)
    feasibility.set_defaults(handler=command_feasibility)

    align = commands.add_parser("align", help=MSG_CMD_ALIGN, parents=[output])
    align.add_argument(
        "scenario", metavar="SCENARIO", nargs="?", help=MSG_SCENARIO_FILE
    )
    align.add_argument(
        "--slip", type=float, help=MSG_SLIP.format(default=RUN_SLIP_DEFAULT)
    )
    align.set_defaults(handler=command_align)
    return parser


def read_scenario(args: argparse.Namespace) -> Scenario:
    """
    读取场景文件, 并用命令行的 --seed 和 --dalpha 覆盖 [run] 中的值.

    异常:
        FileNotFoundError, PermissionError: 读写文件错误
        ScenarioError: 场景内容错误
        pydantic.ValidationError: 覆盖值超出范围
    """

    scenario = load_scenario(args.scenario)
    overrides = {
        key: getattr(args, key)
        for key in ("seed", "dalpha")
        if getattr(args, key, None) is not None
    }
    if overrides:
        run = type(scenario.run).model_validate(
            {**scenario.run.model_dump(), **overrides}
        )
        scenario = scenario.model_copy(update=dict(run=run))
    return scenario


def output_dir(args: argparse.Namespace, scenario: Scenario | None = None) -> Path:
    if args.out:
        return Path(args.out)
    if scenario is not None and scenario.run.output:
        return Path(scenario.run.output)
    return Path(OUTPUT_DIR_DEFAULT)


def command_run(args: argparse.Namespace) -> int:
    scenario = read_scenario(args)
    outcome = core.run(scenario, output_dir(args, scenario), root_logger)
    return EXIT_SUCCESS if outcome.success else EXIT_CLIMB_FAILED


def command_sweep(args: argparse.Namespace) -> int:
    scenario = read_scenario(args)
    core.sweep(
        scenario,
        args.heights,
        args.directions,
        output_dir(args, scenario),
        root_logger,
        workers=args.workers,
    )
    return EXIT_SUCCESS


def command_analyze(args: argparse.Namespace) -> int:
    frame = core.load_log(args.log_csv, args.torque_constant)
    stats = core.log_stats(frame)
    core.write_analysis(frame, stats, output_dir(args), root_logger)
    return EXIT_SUCCESS


def command_feasibility(args: argparse.Namespace) -> int:
    scenario = read_scenario(args)
    report, verdict = core.feasibility(
        scenario, output_dir(args, scenario), root_logger
    )
    return EXIT_SUCCESS if report.ok and verdict.ok else EXIT_CLIMB_FAILED


def command_align(args: argparse.Namespace) -> int:
    scenario = read_scenario(args) if args.scenario else Scenario()
    slip = scenario.run.slip if args.slip is None else args.slip
    if not 0 <= slip < 1:
        raise ValueError(f"slip {slip} outside [0, 1)")
    points = core.alignment_curve(scenario.geometry, slip)
    core.write_alignment(points, output_dir(args, scenario), root_logger, slip)
    return EXIT_SUCCESS


def setup_root_logger(args: argparse.Namespace) -> None:
    """
    根据命令行参数设置根日志记录器的处理器.

    异常:
        SystemExit: 日志配置无效或日志文件无法打开.
    """

    arg_mapping = {
        "log_output": "output",
        "log_format": "output_format",
        "log_level": "level",
    }
    config = {
        config_key: getattr(args, arg_name)
        for arg_name, config_key in arg_mapping.items()
        if getattr(args, arg_name, None) is not None
    }
    try:
        handlers = log.get_handlers([Log.model_validate(config)])
    except (pydantic.ValidationError, OSError) as ex:
        root_logger.critical(MSG_ERROR, extra=dict(exception=ex))
        raise SystemExit(EXIT_ERROR)
    log.replace_handlers(root_logger, handlers)


def log_startup_message() -> None:
    """记录程序启动信息日志."""

    python_version = (
        f"{sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}"
    )
    extra = dict(
        program=__title__,
        version=__version__,
        os=f"{platform.platform()} {platform.architecture()[0]}",
        python=python_version,
        pid=os.getpid(),
    )
    root_logger.info(MSG_STARTED, extra=extra)


def run_command(handler: Callable[[argparse.Namespace], int], args: Any) -> int:
    """执行子命令, 把操作员错误转换为退出码."""

    try:
        return handler(args)
    except OPERATOR_ERRORS as ex:
        root_logger.critical(MSG_ERROR, extra=dict(exception=ex))
        return EXIT_ERROR


def main(argv: Sequence[str] | None = None) -> int:
    # 全局异常处理器
    sys.excepthook = global_exception_handler
    # 解析命令行
    args = parse_args(argv)
    # 设置日志
    setup_root_logger(args)
    # 记录启动信息日志
    log_startup_message()
    # 执行子命令
    return run_command(args.handler, args)


if __name__ == "__main__":
    sys.exit(main())
