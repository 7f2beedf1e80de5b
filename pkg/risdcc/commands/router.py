"""
Command router combining all subcommands
"""

from risdcc.commands import ber, distance, encode, matrix, optimize, validate

COMMANDS = (validate, matrix, encode, distance, optimize, ber)


def register_commands(subparsers):
    """Add every subcommand parser; each sets its handler as a default"""
    for command in COMMANDS:
        command.register(subparsers)
