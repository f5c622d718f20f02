# Filename: diracgap/commands/__init__.py
from . import intervals, reproduce, spectrum, sweep

COMMANDS = (spectrum, sweep, reproduce, intervals)
