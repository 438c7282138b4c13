"""fracflow Command Line Interface."""

from fracflow.cli.output import (
    console,
    format_seconds,
    format_value,
    create_progress,
    parameters_table,
    print_success,
    print_warning,
    print_error,
    print_info,
)

__all__ = [
    "console",
    "format_seconds",
    "format_value",
    "create_progress",
    "parameters_table",
    "print_success",
    "print_warning",
    "print_error",
    "print_info",
]
