"""dB / dBm conversion helpers.

All internal computation in this package is done in linear SI units
(watts, meters). Decibel values appear only at the configuration boundary
and in report columns, through the functions below.
"""

import math


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    return 10.0 * math.log10(value) if value > 0 else float("-inf")


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0 if watts > 0 else float("-inf")


def attenuation_db_to_gain(db: float) -> float:
    """An attenuation of X dB multiplies power by 10^(-X/10)."""
    return 10.0 ** (-db / 10.0)
