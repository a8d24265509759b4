"""
场景文件的解析与序列化.

格式为分节的 key = value 文本, 节为 [geometry], [params], [obstacle], [run], # 开始注释.
"""

from os import PathLike
from typing import Any

import pydantic
from lark import (
    Lark,
    Token,
    Transformer,
    UnexpectedCharacters,
    UnexpectedInput,
    UnexpectedToken,
)

from pwt.omniwheg.config import Scenario
from pwt.omniwheg.errors import ScenarioError
from pwt.omniwheg.utils import format_bool

_GRAMMAR = r"""
    start: (_line? _NL)*
    _line: section | entry
    section: "[" NAME "]"
    entry: NAME "=" VALUE
    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    VALUE: /[^\s#][^\n#]*/
    COMMENT: /#[^\n]*/
    _NL: /\n/
    %ignore COMMENT
    %ignore /[ \t\f\r]+/
"""

_lark = Lark(_GRAMMAR, parser="lalr", lexer="contextual")

SECTIONS = tuple(Scenario.model_fields)


class _LinesTransformer(Transformer[Token, list[tuple[str, str, str, int]]]):
    """把语法树转换为 (类型, 名称, 值, 行号) 列表."""

    def section(self, nodes: list[Token]):
        (name,) = nodes
        return ("section", str(name), "", name.line)

    def entry(self, nodes: list[Token]):
        name, value = nodes
        return ("entry", str(name), str(value).strip(), name.line)

    def start(self, nodes: list[tuple[str, str, str, int]]):
        return list(nodes)


def parse_scenario(text: str) -> Scenario:
    """
    解析场景文本, 缺省的键使用默认值.

    参数:
        text: 场景文本.

    返回:
        校验后的 Scenario.

    异常:
        ScenarioError: 语法错误, 未知的节或键, 重复的键, 值超出范围; line 为出错的行号.
    """

    try:
        tree = _lark.parse(text + "\n")
    except UnexpectedInput as ex:
        raise ScenarioError(_error_line(ex), _describe(ex)) from ex
    lines = _LinesTransformer().transform(tree)

    data: dict[str, dict[str, str]] = {}
    key_lines: dict[tuple[str, ...], int] = {}
    current: str | None = None
    for kind, name, value, line in lines:
        if kind == "section":
            if name not in SECTIONS:
                raise ScenarioError(line, f"unknown section [{name}]")
            current = name
            data.setdefault(name, {})
            key_lines.setdefault((name,), line)
            continue
        if current is None:
            raise ScenarioError(line, f"key '{name}' outside of any section")
        model = Scenario.model_fields[current].annotation
        if name not in model.model_fields:  # type: ignore[union-attr]
            raise ScenarioError(line, f"unknown key '{name}' in [{current}]")
        if name in data[current]:
            first = key_lines[(current, name)]
            raise ScenarioError(line, f"duplicate key '{name}' (first on line {first})")
        data[current][name] = value
        key_lines[(current, name)] = line

    try:
        return Scenario.model_validate(data)
    except pydantic.ValidationError as ex:
        error = ex.errors()[0]
        loc = tuple(str(part) for part in error["loc"])
        line = key_lines.get(loc[:2]) or key_lines.get(loc[:1])
        raise ScenarioError(line, f"{'.'.join(loc)}: {error['msg']}") from ex


def load_scenario(path: str | PathLike[str]) -> Scenario:
    """
    读取并解析场景文件.

    异常:
        FileNotFoundError, PermissionError: 读写文件错误
        UnicodeDecodeError: 文件不是 UTF-8 文本
        ScenarioError: 场景内容错误
    """

    with open(path, encoding="utf-8") as file:
        return parse_scenario(file.read())


def _error_line(ex: UnexpectedInput) -> int | None:
    line = getattr(ex, "line", -1)
    return line if isinstance(line, int) and line > 0 else None


def _describe(ex: UnexpectedInput) -> str:
    if isinstance(ex, UnexpectedCharacters):
        return f"unexpected character {ex.char!r}"
    if isinstance(ex, UnexpectedToken):
        if ex.token.type == "$END":
            return "unexpected end of input"
        return f"unexpected {str(ex.token).strip() or 'line break'!r}"
    return "malformed line"


def _format_value(value: Any) -> str:
    match value:
        case bool():
            return format_bool(value)
        case float():
            return repr(value)
        case tuple() | list():
            return ",".join(_format_value(item) for item in value)
    return str(value)


def serialize_scenario(scenario: Scenario) -> str:
    """
    把场景写为文本, 浮点数按 repr 输出, 保证 parse_scenario 能精确还原.
    """

    lines: list[str] = []
    for section in SECTIONS:
        if lines:
            lines.append("")
        lines.append(f"[{section}]")
        model = getattr(scenario, section)
        for key in type(model).model_fields:
            value = getattr(model, key)
            if value is None:
                continue
            lines.append(f"{key} = {_format_value(value)}")
    return "".join(f"{line}\n" for line in lines)
