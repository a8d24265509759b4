import logging
import math
from datetime import datetime
from functools import partial
from typing import Annotated, Any, Callable, Mapping, Self

from pydantic import (
    AfterValidator,
    BaseModel,
    BeforeValidator,
    Field,
    ValidationInfo,
    ValidatorFunctionWrapHandler,
    field_validator,
    model_validator,
)
from pydantic_core import PydanticCustomError, PydanticUndefined

from pwt.omniwheg import constants
from pwt.omniwheg.entity import Direction
from pwt.omniwheg.utils import casefold_in_list, split_to_list


def convert(
    func: Callable[..., Any], ignore_none: bool = True, **kwargs: Any
) -> BeforeValidator:
    partial_func = partial(func, **kwargs)

    def validator(value: Any) -> Any:
        if ignore_none and value is None:
            return value
        try:
            return partial_func(value)
        except Exception:
            return value

    return BeforeValidator(validator)


def check(
    func: Callable[..., Any], ignore_none: bool = True, **kwargs: Any
) -> AfterValidator:
    partial_func = partial(func, **kwargs)

    def validator(value: Any) -> Any:
        if ignore_none and value is None:
            return value
        try:
            partial_func(value)
        except Exception as ex:
            raise PydanticCustomError("format_error", "{str_ex}", {"str_ex": str(ex)})
        return value

    return AfterValidator(validator)


def _finite(value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{value} is not a finite number")


class BaseModelEx(BaseModel):
    @field_validator("*", mode="wrap")
    @classmethod
    def use_default_value(
        cls: type[Self],
        value: Any,
        validator: ValidatorFunctionWrapHandler,
        info: ValidationInfo,
        /,
    ) -> Any:
        if isinstance(value, str | list | dict | tuple | set | None) and not value:
            if info and info.field_name:
                field_info = cls.model_fields.get(info.field_name)
                if field_info:
                    default = field_info.get_default(call_default_factory=True)
                    if default is not PydanticUndefined:
                        if info.config and info.config.get("validate_default"):
                            return validator(default)
                        return default
        return validator(value)


class WheelGeometry(BaseModelEx, frozen=True, extra="forbid"):
    r_wheel: Annotated[
        float,
        Field(gt=0),
    ] = constants.GEOMETRY_R_WHEEL_DEFAULT
    r_leg: Annotated[
        float,
        Field(gt=0),
    ] = constants.GEOMETRY_R_LEG_DEFAULT
    r_contact: Annotated[
        float,
        Field(gt=0),
    ] = constants.GEOMETRY_R_CONTACT_DEFAULT
    l2_max: Annotated[
        float,
        Field(gt=0),
    ] = constants.GEOMETRY_L2_MAX_DEFAULT
    lobe_count: Annotated[
        int,
        Field(ge=2),
    ] = constants.GEOMETRY_LOBE_COUNT_DEFAULT
    tilt_max: Annotated[
        float,
        Field(gt=0, le=math.pi / 2),
    ] = constants.GEOMETRY_TILT_MAX_DEFAULT
    servo_max: Annotated[
        float,
        Field(gt=0, le=2 * math.pi),
    ] = constants.GEOMETRY_SERVO_MAX_DEFAULT
    asym_offset: Annotated[
        float,
        Field(ge=0),
    ] = constants.GEOMETRY_ASYM_OFFSET_DEFAULT

    @model_validator(mode="after")
    def check_radii(self) -> Self:
        if not self.r_wheel < self.r_contact <= self.r_leg:
            raise ValueError(
                "radii must satisfy 0 < r_wheel < r_contact <= r_leg, got "
                f"r_wheel={self.r_wheel}, r_contact={self.r_contact}, "
                f"r_leg={self.r_leg}"
            )
        if self.asym_offset >= self.r_contact:
            raise ValueError(
                f"asym_offset={self.asym_offset} must be smaller than r_contact"
            )
        return self


class RobotParams(BaseModelEx, frozen=True, extra="forbid"):
    mass_total: Annotated[
        float,
        Field(gt=0),
    ] = constants.PARAMS_MASS_TOTAL_DEFAULT
    f_wheel: Annotated[
        float,
        Field(gt=0),
    ] = constants.PARAMS_F_WHEEL_DEFAULT
    torque_constant: Annotated[
        float,
        Field(gt=0),
    ] = constants.PARAMS_TORQUE_CONSTANT_DEFAULT
    motor_torque_limit: Annotated[
        float,
        Field(gt=0),
    ] = constants.PARAMS_MOTOR_TORQUE_LIMIT_DEFAULT
    servo_torque_limit: Annotated[
        float,
        Field(gt=0),
    ] = constants.PARAMS_SERVO_TORQUE_LIMIT_DEFAULT
    track_width: Annotated[
        float,
        Field(gt=0),
    ] = constants.PARAMS_TRACK_WIDTH_DEFAULT
    wheel_base: Annotated[
        float,
        Field(gt=0),
    ] = constants.PARAMS_WHEEL_BASE_DEFAULT
    rolling_coefficient: Annotated[
        float,
        Field(ge=0),
    ] = constants.PARAMS_ROLLING_COEFFICIENT_DEFAULT
    weight_transfer: Annotated[
        float,
        Field(gt=0),
    ] = constants.PARAMS_WEIGHT_TRANSFER_DEFAULT
    com_offset: Annotated[
        float,
        check(_finite),
    ] = constants.PARAMS_COM_OFFSET_DEFAULT

    @model_validator(mode="before")
    @classmethod
    def derive_wheel_load(cls, data: Any) -> Any:
        # 只给出整机质量时, 按四轮均分推导单轮载荷
        if isinstance(data, Mapping) and data.get("f_wheel") in (None, ""):
            if data.get("mass_total") not in (None, ""):
                try:
                    mass = float(data["mass_total"])
                except (TypeError, ValueError):
                    return data
                return {**data, "f_wheel": mass * constants.GRAVITY / 4}
        return data


class Obstacle(BaseModelEx, frozen=True, extra="forbid"):
    height: Annotated[
        float,
        Field(ge=0, le=constants.OBSTACLE_HEIGHT_MAX),
    ] = constants.OBSTACLE_HEIGHT_DEFAULT
    direction: Annotated[
        Direction,
        convert(
            casefold_in_list,
            lst=constants.OBSTACLE_DIRECTION_OPTIONS,
            on_not_found="original",
        ),
    ] = Direction(constants.OBSTACLE_DIRECTION_DEFAULT)


class RunConfig(BaseModelEx, frozen=True, extra="forbid"):
    phase_offsets: Annotated[
        tuple[float, float, float, float],
        convert(split_to_list, sep=","),
    ] = constants.RUN_PHASE_OFFSETS_DEFAULT
    heading_error: Annotated[
        float,
        Field(ge=-math.pi, le=math.pi),
    ] = constants.RUN_HEADING_ERROR_DEFAULT
    slip: Annotated[
        float,
        Field(ge=0, lt=1),
    ] = constants.RUN_SLIP_DEFAULT
    seed: Annotated[
        int,
        Field(ge=0),
    ] = constants.RUN_SEED_DEFAULT
    randomize_phases: bool = constants.RUN_RANDOMIZE_PHASES_DEFAULT
    approach_distance: Annotated[
        float,
        Field(gt=0, le=10),
    ] = constants.RUN_APPROACH_DISTANCE_DEFAULT
    dalpha: Annotated[
        float,
        Field(gt=0, le=0.1),
    ] = constants.RUN_DALPHA_DEFAULT
    drive_rate: Annotated[
        float,
        Field(gt=0),
    ] = constants.RUN_DRIVE_RATE_DEFAULT
    output: str | None = constants.RUN_OUTPUT_DEFAULT

    @field_validator("phase_offsets")
    @classmethod
    def check_offsets(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        for offset in value:
            _finite(offset)
        return value


class Scenario(BaseModelEx, frozen=True, extra="forbid"):
    geometry: WheelGeometry = Field(default_factory=WheelGeometry)
    params: RobotParams = Field(default_factory=RobotParams)
    obstacle: Obstacle = Field(default_factory=Obstacle)
    run: RunConfig = Field(default_factory=RunConfig)


class Log(BaseModelEx):
    output: Annotated[
        str | constants.LOG_OUTPUT_TYPE,
        convert(
            casefold_in_list,
            lst=constants.LOG_OUTPUT_OPTIONS,
            on_not_found="original",
        ),
    ] = constants.LOG_OUTPUT_DEFAULT
    output_format: Annotated[
        constants.LOG_OUTPUT_FORMAT_TYPE,
        convert(str.lower),
    ] = constants.LOG_OUTPUT_FORMAT_DEFAULT
    level: Annotated[
        constants.LOG_LEVEL_TYPE,
        convert(str.upper),
    ] = constants.LOG_LEVEL_DEFAULT
    text_format: Annotated[
        str,
        check(lambda value: logging.StrFormatStyle(value).validate()),
    ] = constants.LOG_TEXT_FORMAT_DEFAULT
    date_format: Annotated[
        str | None,
        check(datetime.now().strftime),
    ] = constants.LOG_DATE_FORMAT_DEFAULT
