# 命令行帮助
MSG_DESCRIPTION = (
    "Quasi-static simulation and analysis toolkit "
    "for an omnidirectional wheel-leg robot."
)
MSG_EPILOG = "See {url} for the scenario format and output layouts."
MSG_HELP = "Show this help message and exit."
MSG_VERSION = "Show program's version number and exit."
MSG_VERBOSE = "Set log level to {level}."
MSG_LOG_LEVEL = "Log level (default: {default})."
MSG_LOG_OUTPUT = "Log output, one of {options} or a file path."
MSG_LOG_FORMAT = "Log format, one of {options}."
MSG_SCENARIO_FILE = "Scenario file ([geometry], [params], [obstacle], [run] sections)."
MSG_OUT_DIR = "Output directory (default: scenario output or '{default}')."
MSG_SEED = "Seed for initial phase randomization."
MSG_DALPHA = "Angular simulation step in radians."
MSG_HEIGHTS = "Comma separated obstacle heights in meters (default: {default})."
MSG_DIRECTIONS = "Comma separated directions (default: forward,backward)."
MSG_WORKERS = "Number of concurrent sweep cells (default: {default})."
MSG_LOG_CSV = "Recorded current log with columns t and i_<motor>."
MSG_TORQUE_CONSTANT = "Motor torque constant in N*m/A (default: {default})."
MSG_SLIP = "Slip coefficient in [0, 1) (default: {default})."
MSG_CMD_RUN = "Plan and simulate one scenario."
MSG_CMD_SWEEP = "Simulate a grid of heights and directions."
MSG_CMD_ANALYZE = "Convert a recorded current log into torque statistics."
MSG_CMD_FEASIBILITY = "Report worst-case actuator torque requirements."
MSG_CMD_ALIGN = "Tabulate commanded and achieved alignment displacement."

# 运行日志
MSG_STARTED = "{program} {version} started, python {python}, pid {pid}."
MSG_SIGINT = "Interrupted by user."
MSG_TRACEBACK = "Unhandled exception, traceback written to {path}."
MSG_ERROR = "{exception}"
MSG_SCENARIO = "Scenario loaded: height {height} m, direction {direction}."
MSG_ACTION = "{phase}: {kind} {axle} {magnitude:.6g} {unit} -> {successor}."
MSG_ACTION_FAILED = "{phase}: {kind} {axle} aborted: {exception}."
MSG_CLIMB_FAILED = "Climb failed in {phase}: {reason}."
MSG_RUN_SUMMARY = (
    "Climb {result}: peak torque {peak_torque:.4f} N*m, "
    "mean torque {mean_torque:.4f} N*m, lateral {lateral:.4f} m."
)
MSG_SWEEP_CELL = "Sweep cell height {height} m {direction}: {result}."
MSG_SWEEP_FINISHED = "Sweep finished, {cells} cells written to {path}."
MSG_ARTIFACT = "Wrote {path}."
MSG_FEASIBILITY = (
    "Motor requires {motor_required:.4f} of {motor_limit:.4f} N*m ({motor}), "
    "servo requires {servo_required:.4f} of {servo_limit:.4f} N*m ({servo})."
)
MSG_ANALYSIS = (
    "Log analyzed: {samples} samples, "
    "peak torque {peak_torque:.4f} N*m, mean torque {mean_torque:.4f} N*m."
)
MSG_ALIGNMENT = "Alignment curve with slip {slip}: worst total command {worst:.4f} m."
