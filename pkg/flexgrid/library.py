# -*- coding: utf-8 -*-
#
# library.py
#
# purpose:  Low level routines.
# author:   flexgrid developers
# created:  12-Mar-2024
# modified: Mon 19 Oct 2026 09:20:11 AM UTC
#
# obs:
#

import numpy as np

from .constants import LEAKY_SLOPE
from .errors import ConfigError


__all__ = ['leaky_relu',
           'leaky_relu_deriv',
           'sigmoid',
           'net_load',
           'charging_steps',
           'minutes_to_step']


def leaky_relu(x, eta=LEAKY_SLOPE):
    r"""Leaky rectifier used by every hidden unit.

    .. math::
        f(x) = \begin{cases} x & x > 0 \\ \eta x & x \le 0 \end{cases}

    With :math:`\eta = 0` this is the plain rectifier :math:`\max(0, x)`.

    Parameters
    ----------
    x : array_like
        pre-activation
    eta : float, optional
          slope of the negative branch [no units]

    Returns
    -------
    f : array_like
        activation

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.leaky_relu([-2., 0., 3.], eta=0.01)
    array([-0.02,  0.  ,  3.  ])
    """

    x = np.asanyarray(x, dtype=float)
    return np.where(x > 0, x, eta * x)


def leaky_relu_deriv(x, eta=LEAKY_SLOPE):
    """Derivative of :func:`leaky_relu`; 1 for x > 0 and `eta` otherwise
    (the value at exactly 0 is `eta`).
    """

    x = np.asanyarray(x, dtype=float)
    return np.where(x > 0, 1.0, eta)


def sigmoid(x):
    """Logistic function evaluated without overflow for large |x|.

    Parameters
    ----------
    x : array_like
        logits

    Returns
    -------
    p : array_like
        probabilities in (0, 1)

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.sigmoid([0.])
    array([0.5])
    """

    x = np.asanyarray(x, dtype=float)
    # Split by sign so exp never sees a large positive argument.
    ex = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + ex), ex / (1.0 + ex))


def net_load(base, pv, *devices):
    """Consumption minus generation at every step.

    Parameters
    ----------
    base : array_like
           fixed base load [kW]
    pv : array_like
         on-site generation [kW]
    devices : array_like
              device loads [kW], any number

    Returns
    -------
    net : array_like
          net load [kW]; negative values are exports

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.net_load([1., 1.], [0., 2.], [0.5, 0.5])
    array([ 1.5, -0.5])
    """

    net = np.array(base, dtype=float)
    for device in devices:
        net = net + np.asanyarray(device, dtype=float)
    return net - np.asanyarray(pv, dtype=float)


def charging_steps(energy_kwh, power_kw, step_hours):
    """Splits an energy budget into whole steps at full power plus the
    energy left for one partial step.

    Parameters
    ----------
    energy_kwh : float
                 energy budget [kWh]
    power_kw : float
               charging power [kW]
    step_hours : float
                 step length [h]

    Returns
    -------
    n_full : int
             number of full-power steps
    remainder_kwh : float
                    energy of the final partial step [kWh], 0 if none

    Examples
    --------
    >>> import flexgrid as fg
    >>> fg.charging_steps(6.6, 3.3, 0.25)
    (8, 0.0)
    """

    if energy_kwh <= 0:
        return 0, 0.0
    if power_kw <= 0:
        raise ConfigError('positive power needed to deliver %g kWh' %
                         energy_kwh)
    step_kwh = power_kw * step_hours
    # Tolerate the rounding of budgets that are whole multiples of a step.
    n_full = int(np.floor(energy_kwh / step_kwh + 1e-9))
    remainder = energy_kwh - n_full * step_kwh
    if remainder <= 1e-9 * max(1.0, energy_kwh):
        remainder = 0.0
    return n_full, remainder


def minutes_to_step(minute, step_minutes):
    """Index of the step whose left-closed interval contains `minute`."""

    return int(minute // step_minutes)
