from .fit import register_fit_command
from .infer import register_infer_command
from .tune import register_tune_command
from .simulate import register_simulate_command
from .rerun import register_rerun_command


def register_all_commands(subparsers):
    """Register all subcommands with the CLI parser."""
    register_fit_command(subparsers)
    register_infer_command(subparsers)
    register_tune_command(subparsers)
    register_simulate_command(subparsers)
    register_rerun_command(subparsers)
