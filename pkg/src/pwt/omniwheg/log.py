"""
日志配置: 处理器按 Log 配置创建, 消息模板为花括号风格, 由 extra 字段填充.
"""

import dataclasses
import json
import logging
import sys
import traceback
from enum import Enum
from typing import Any, Iterable, Literal, override

from pwt.omniwheg import constants
from pwt.omniwheg.config import Log

# LogRecord 自带的属性, 其余属性视为 extra 字段
# fmt: off
RESERVED_FIELDS = frozenset({
    'name', 'msg', 'args', 'levelname', 'levelno', 'pathname', 'filename', 'module',
    'exc_info', 'exc_text', 'stack_info', 'lineno', 'funcName', 'created', 'msecs',
    'relativeCreated', 'thread', 'threadName', 'processName', 'process', 'taskName',
    'message', 'asctime', 'stacklevel'
})
# fmt: on


def get_standard_logger(name: str | None = constants.LOG_ROOT_NAME) -> logging.Logger:
    """
    获取根日志记录器, 在命令行参数解析之前使用默认处理器.

    参数:
        name: 日志记录器的名称.

    返回:
        配置好的日志记录器.
    """

    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    handler = StandardHandler()
    handler.setLevel(constants.LOG_LEVEL_DEFAULT)
    handler.setFormatter(EnhancedFormatter(constants.LOG_TEXT_FORMAT_DEFAULT))
    logger.addHandler(handler)
    return logger


def _open_handler(output: str) -> logging.Handler:
    match output:
        case "std":
            return StandardHandler()
        case "stdout":
            return logging.StreamHandler(sys.stdout)
        case "stderr":
            return logging.StreamHandler(sys.stderr)
    return logging.FileHandler(output, encoding="utf-8")


def get_handlers(logs: Iterable[Log]) -> list[logging.Handler]:
    """
    根据日志配置创建处理器.

    参数:
        logs: 日志配置.

    返回:
        处理器列表, 与 logs 一一对应.

    异常:
        FileNotFoundError, PermissionError: 读写文件错误
    """

    handlers = []
    for config in logs:
        handler = _open_handler(config.output)
        handler.setLevel(config.level)
        handler.setFormatter(
            EnhancedFormatter(
                config.text_format,
                config.date_format,
                output_format=config.output_format,
            )
        )
        handlers.append(handler)
    return handlers


def replace_handlers(
    logger: logging.Logger, handlers: Iterable[logging.Handler]
) -> None:
    """关闭并替换日志记录器上已有的处理器."""

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    for handler in handlers:
        logger.addHandler(handler)


class StandardHandler(logging.Handler):
    """
    标准日志处理器, WARNING 以下输出到标准输出流, 其余输出到标准错误流.
    """

    def __init__(self) -> None:
        super().__init__()
        self.stdout = sys.stdout
        self.stderr = sys.stderr

    def flush(self) -> None:
        with self.lock:  # type: ignore
            self.stdout.flush()
            self.stderr.flush()

    def emit(self, record: logging.LogRecord) -> None:
        try:
            stream = self.stdout if record.levelno < logging.WARNING else self.stderr
            stream.write(f"{self.format(record)}\n")
            stream.flush()
        except RecursionError:
            raise
        except Exception:
            self.handleError(record)

    def __repr__(self) -> str:
        level = logging.getLevelName(self.level)
        return f"<{type(self).__name__} <stdout> <stderr> ({level})>"


def extra_fields(record: logging.LogRecord) -> dict[str, Any]:
    """日志记录中通过 extra 传入的字段."""

    return {
        key: value
        for key, value in vars(record).items()
        if key not in RESERVED_FIELDS and not key.startswith("_")
    }


class EnhancedFormatter(logging.Formatter):
    """
    扩展的格式器.

    消息模板和 textfmt 都使用花括号风格, 由日志记录的属性 (含 extra) 填充;
    output_format 为 json 时每条日志输出为一个 JSON 对象, extra 字段并入其中.
    """

    def __init__(
        self,
        textfmt: str | None = None,
        datefmt: str | None = None,
        *,
        output_format: Literal["text", "json"] = "text",
    ) -> None:
        super().__init__(textfmt, datefmt, style="{")
        self.output_format = output_format

    @override
    def format(self, record: logging.LogRecord) -> str:
        record.message = str(record.msg).format(*record.args, **vars(record))
        record.asctime = self.formatTime(record, self.datefmt)
        if self.output_format == "json":
            return json.dumps(
                self._to_dict(record), ensure_ascii=False, default=_json_default
            )
        text = self.formatMessage(record)
        if record.exc_info:
            text = f"{text}\n{self.formatException(record.exc_info)}"
        return text

    def _to_dict(self, record: logging.LogRecord) -> dict[str, Any]:
        data: dict[str, Any] = {
            "timestamp": record.asctime,
            "level": record.levelname,
            "logger": record.name,
            "message": record.message,
            "location": {
                "module": record.module,
                "function": record.funcName,
                "line": record.lineno,
            },
        }
        if record.exc_info and record.exc_info[1] is not None:
            data["exception"] = _json_default(record.exc_info[1])
        data.update(extra_fields(record))
        return data


def _json_default(obj: Any) -> Any:
    """JSON 无法直接序列化的值: 枚举, 数据类 (如统计记录), 异常, 路径等."""

    if isinstance(obj, Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return dataclasses.asdict(obj)
    if isinstance(obj, BaseException):
        return {
            "type": type(obj).__name__,
            "message": str(obj),
            "traceback": "".join(
                traceback.format_exception(type(obj), obj, obj.__traceback__)
            ),
        }
    return str(obj)
