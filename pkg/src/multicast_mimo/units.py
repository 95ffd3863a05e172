"""Power and ratio unit conversions. All simulator internals are linear Watts."""

import numpy as np


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


def dbw_to_watts(value_dbw):
    return db_to_linear(value_dbw)


def watts_to_dbw(value_w):
    return linear_to_db(value_w)


def dbm_to_watts(value_dbm):
    return 10.0 ** ((np.asarray(value_dbm, dtype=float) - 30.0) / 10.0)
