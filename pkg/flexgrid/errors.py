# -*- coding: utf-8 -*-
#
# errors.py
#
# purpose:  Exceptions raised by flexgrid.
# author:   flexgrid developers
# created:  12-Mar-2024
# modified: Mon 19 Oct 2026 09:14:02 AM UTC
#
# obs:  Each class also derives from the closest builtin so that callers
#       catching ValueError, IndexError, etc. keep working.
#

__all__ = ['FlexgridError',
           'SchemaError',
           'OrderingError',
           'BoundsError',
           'ShapeError',
           'ConfigError',
           'ContractError',
           'EpisodeStateError',
           'NumericError',
           'CapacityError']


class FlexgridError(Exception):
    """Base class of every flexgrid error."""


class SchemaError(FlexgridError, ValueError):
    """Input file misses a required column or key."""


class OrderingError(FlexgridError, ValueError):
    """Timestamps are not strictly increasing."""


class BoundsError(FlexgridError, IndexError):
    """Step or action index outside its range."""


class ShapeError(FlexgridError, ValueError):
    """Series length or input width does not match."""


class ConfigError(FlexgridError, ValueError):
    """Invalid configuration value."""


class ContractError(FlexgridError, ValueError):
    """Arguments that must belong together do not."""


class EpisodeStateError(FlexgridError, RuntimeError):
    """Operation not allowed in the current episode state."""


class NumericError(FlexgridError, ArithmeticError):
    """Non-finite loss or gradient."""


class CapacityError(FlexgridError, RuntimeError):
    """Search space larger than the enumeration bound."""
