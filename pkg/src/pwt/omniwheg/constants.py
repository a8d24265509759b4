import math
from typing import Literal

from pwt.omniwheg import __title__

HELP_URL = "https://github.com/PowerWordTree/OmniWheg"

GRAVITY = 9.81

# 轮子几何 (单位: m, rad)
GEOMETRY_R_WHEEL_DEFAULT = 0.095
GEOMETRY_R_LEG_DEFAULT = 0.150
GEOMETRY_R_CONTACT_DEFAULT = 0.132
GEOMETRY_L2_MAX_DEFAULT = 0.065
GEOMETRY_LOBE_COUNT_DEFAULT = 4
GEOMETRY_TILT_MAX_DEFAULT = math.pi / 3
GEOMETRY_SERVO_MAX_DEFAULT = math.pi / 2
GEOMETRY_ASYM_OFFSET_DEFAULT = 0.02

# 机器人参数
PARAMS_MASS_TOTAL_DEFAULT = 5.5
PARAMS_F_WHEEL_DEFAULT = 13.48
PARAMS_TORQUE_CONSTANT_DEFAULT = 0.741
PARAMS_MOTOR_TORQUE_LIMIT_DEFAULT = 3.0
PARAMS_SERVO_TORQUE_LIMIT_DEFAULT = 2.0
PARAMS_TRACK_WIDTH_DEFAULT = 0.39
PARAMS_WHEEL_BASE_DEFAULT = 0.32
PARAMS_ROLLING_COEFFICIENT_DEFAULT = 0.02
PARAMS_WEIGHT_TRANSFER_DEFAULT = 1.0
PARAMS_COM_OFFSET_DEFAULT = 0.0

# 障碍物
OBSTACLE_HEIGHT_DEFAULT = 0.20
OBSTACLE_HEIGHT_MAX = 0.40
OBSTACLE_DIRECTION_DEFAULT = "forward"
OBSTACLE_DIRECTION_OPTIONS = ("forward", "backward")

# 运行
RUN_PHASE_OFFSETS_DEFAULT = (0.0, 0.0, 0.0, 0.0)
RUN_HEADING_ERROR_DEFAULT = 0.0
RUN_SLIP_DEFAULT = 0.08
RUN_SEED_DEFAULT = 0
RUN_RANDOMIZE_PHASES_DEFAULT = False
RUN_APPROACH_DISTANCE_DEFAULT = 0.30
RUN_DALPHA_DEFAULT = math.radians(0.5)
RUN_DRIVE_RATE_DEFAULT = 1.0
RUN_OUTPUT_DEFAULT = None

# 规划
ALIGN_TOLERANCE = math.radians(1.0)
ALIGN_MAX_ROUNDS = 3
POSITION_TOLERANCE = 1e-9
CONTACT_TOLERANCE = 1e-9

# 失败原因
REASON_HOOK_REACH = "hook reach"
REASON_MOTOR_TORQUE = "motor torque"
REASON_SERVO_TORQUE = "servo torque"
REASON_ALIGNMENT = "alignment"
REASON_STALL = "stall"
REASON_TIP_OVER = "tip-over"
REASON_CONTACT = "unreachable contact"

# 输出
CSV_DIGITS = 9
TELEMETRY_HEADER = (
    "t",
    "i_fl",
    "i_fr",
    "i_rl",
    "i_rr",
    "tau_fl",
    "tau_fr",
    "tau_rl",
    "tau_rr",
    "s",
    "z",
    "phase",
)
SWEEP_HEADER = (
    "height",
    "direction",
    "success",
    "peak_torque",
    "mean_torque",
    "reason",
    "telemetry",
)
SWEEP_HEIGHTS_DEFAULT = (0.12, 0.14, 0.16, 0.18, 0.20, 0.22, 0.24, 0.26)
TELEMETRY_FILE = "telemetry.csv"
ACTIONS_FILE = "actions.txt"
SUMMARY_FILE = "summary.json"
FEASIBILITY_FILE = "feasibility.csv"
SWEEP_FILE = "sweep.csv"
ALIGNMENT_FILE = "alignment.csv"
ANALYSIS_FILE = "analysis.csv"
ANALYSIS_STATS_FILE = "analysis.json"
SWEEP_TELEMETRY_FILE = "telemetry-{height}-{direction}.csv"
SWEEP_WORKERS_DEFAULT = 4
FEASIBILITY_HEADER = ("check", "required", "limit", "ok")
ALIGNMENT_HEADER = (
    "difference_deg",
    "analytic",
    "achieved",
    "total_commanded",
    "total_achieved",
    "rounds",
    "residual_deg",
    "aligned",
)
ALIGNMENT_RANGE_DEG = 45
OUTPUT_DIR_DEFAULT = "out"

EXIT_SUCCESS = 0
EXIT_ERROR = 1
EXIT_CLIMB_FAILED = 2

LOG_ROOT_NAME = __title__
LOG_OUTPUT_DEFAULT = "std"
LOG_OUTPUT_OPTIONS = ("std", "stdout", "stderr")
LOG_OUTPUT_TYPE = Literal["std", "stdout", "stderr"]
LOG_OUTPUT_FORMAT_DEFAULT = "text"
LOG_OUTPUT_FORMAT_OPTIONS = ("text", "json")
LOG_OUTPUT_FORMAT_TYPE = Literal["text", "json"]
LOG_LEVEL_DEFAULT = "INFO"
LOG_LEVEL_OPTIONS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")
LOG_LEVEL_TYPE = Literal["CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG"]
LOG_LEVEL_VERBOSE = "DEBUG"
LOG_TEXT_FORMAT_DEFAULT = "{levelname}: {message}"
LOG_DATE_FORMAT_DEFAULT = "%Y-%m-%d %H:%M:%S"
