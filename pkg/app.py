"""
Volset - Exact Volume Sets over Finite Fields

Main command-line application.
"""
import logging
import sys
from typing import Optional, Sequence

import click

from config import Config
from models import Report
from routes.checks import check_commands
from routes.commands import computation_commands
from routes.common import EXIT_USAGE
from services.reports import error_report

logger = logging.getLogger('volset')

_HANDLER_TAG = 'volset'


def create_cli(config_class=Config) -> click.Group:
    """Application factory."""
    # Ensure required directories exist
    config_class.ensure_directories()

    # Set up logging
    setup_logging()

    @click.group(name=config_class.TOOL_NAME,
                 help='Exact volume sets, incidence counts and coverage checks over F_q^d.')
    @click.version_option(config_class.VERSION, prog_name=config_class.TOOL_NAME)
    def cli():
        pass

    # Register commands
    for command in computation_commands + check_commands:
        cli.add_command(command)

    logger.debug(f'{config_class.TOOL_NAME} {config_class.VERSION} ready with {len(cli.commands)} commands')
    return cli


def setup_logging():
    """Configure application logging (stdout is reserved for reports)."""
    log_level = getattr(logging, Config.LOG_LEVEL.upper(), logging.INFO)
    root = logging.getLogger()
    if any(getattr(h, 'name', None) == _HANDLER_TAG for h in root.handlers):
        return

    # Console handler
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.set_name(_HANDLER_TAG)
    console_handler.setLevel(log_level)
    console_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    console_handler.setFormatter(console_formatter)
    root.addHandler(console_handler)

    # File handler (if log directory configured)
    if Config.LOG_DIR:
        Config.LOG_DIR.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(Config.LOG_DIR / 'volset.log')
        file_handler.set_name(_HANDLER_TAG)
        file_handler.setLevel(log_level)
        file_handler.setFormatter(console_formatter)
        root.addHandler(file_handler)

    root.setLevel(log_level)

    # Set log level for other loggers
    logging.getLogger('services').setLevel(log_level)
    logging.getLogger('routes').setLevel(log_level)

    # Suppress some noisy loggers
    logging.getLogger('numba').setLevel(logging.WARNING)


def run_command(argv: Sequence[str]) -> Optional[Report]:
    """
    Run one subcommand in-process.

    Args:
        argv: Arguments after the program name, e.g. ['sharp', '--p', '3', '--d', '3']

    Returns:
        The command's report (None for commands that emit files, such as
        gen, and for --help / --version)
    """
    state = {}
    try:
        cli.main(args=list(argv), prog_name=Config.TOOL_NAME, standalone_mode=False, obj=state)
    except click.UsageError as e:
        e.show()
        name = argv[0] if argv else ''
        return error_report(name, {'argv': list(argv)}, e.format_message(), 'USAGE_ERROR', EXIT_USAGE)
    return state.get('report')


def main():
    cli.main(prog_name=Config.TOOL_NAME, obj={})


# Create application instance
cli = create_cli()


if __name__ == '__main__':
    main()
