class OmniWhegError(Exception):
    """本项目所有异常的基类."""


class DomainError(OmniWhegError, ValueError):
    """参数超出定义域."""


class ModeError(OmniWhegError):
    """轮子模式不满足操作要求 (例如腿模式下调用混合器, 运动中变形)."""


class StallError(OmniWhegError):
    """所需力矩超过执行器上限."""

    def __init__(self, actuator: str, torque: float, limit: float) -> None:
        super().__init__(actuator, torque, limit)
        self.actuator = actuator
        self.torque = torque
        self.limit = limit

    def __str__(self) -> str:
        return (
            f"{self.actuator} stall - required {self.torque:.4f} N*m "
            f"exceeds limit {self.limit:.4f} N*m"
        )


class TipOverError(OmniWhegError):
    """重心投影落在支撑区间之外."""

    def __init__(self, com: float, support: tuple[float, float]) -> None:
        super().__init__(com, support)
        self.com = com
        self.support = support

    def __str__(self) -> str:
        low, high = self.support
        return (
            f"center of mass at s={self.com:.4f} "
            f"outside support [{low:.4f}, {high:.4f}]"
        )


class InfeasibleError(OmniWhegError):
    """障碍物超出可攀爬范围."""

    def __init__(self, check: str, detail: str = "") -> None:
        super().__init__(check, detail)
        self.check = check
        self.detail = detail

    def __str__(self) -> str:
        if self.detail:
            return f"infeasible obstacle - {self.check} - {self.detail}"
        return f"infeasible obstacle - {self.check}"


class ScenarioError(OmniWhegError):
    """场景文件解析或校验错误."""

    def __init__(self, line: int | None, message: str) -> None:
        super().__init__(line, message)
        self.line = line
        self.message = message

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"line {self.line}: {self.message}"


class DataError(OmniWhegError):
    """日志数据错误."""

    def __init__(self, row: int | None, message: str) -> None:
        super().__init__(row, message)
        self.row = row
        self.message = message

    def __str__(self) -> str:
        if self.row is None:
            return self.message
        return f"row {self.row}: {self.message}"
