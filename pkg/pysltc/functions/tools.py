import os
import math
import numpy as np
import pandas as pd
from pysltc.constants import GROUP_SEPARATOR
from pysltc.errors import MissingInput, SchemaViolation


def substream(seed, *key):
    """
    Independent random generator derived from the master seed and an entity key.

    Generators built from the same (seed, key) pair produce the same sequence no matter
    in which order entities are processed.

    :param seed: master seed (non-negative integer).
    :param key: stream selector followed by entity ids (non-negative integers).
    :return: numpy.random.Generator.
    """
    entropy = [int(seed)] + [int(k) for k in key]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def round_half_away(x):
    """
    Round half away from zero.

    :param x: number or numpy array.
    :return: numpy array of integers (int64).
    """
    x = np.asarray(x, dtype=float)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def compensated_sum(values):
    return math.fsum(float(v) for v in values)


def commodity_of(group):
    """
    Commodity part of an establishment group label.

    :param group: group label "<commodity>.<industry>".
    :return: commodity string.
    """
    return str(group).split(GROUP_SEPARATOR, 1)[0]


def epg_label(commodity, receiver_function, supplier_function):
    return GROUP_SEPARATOR.join((commodity, receiver_function, supplier_function))


def read_table(path, columns, dtypes=None):
    """
    Read CSV file and check its schema.

    :param path: CSV file path.
    :param columns: required column names.
    :param dtypes: (optional) dict column -> "int", "float", "str" or "bool".
    :return: pandas.DataFrame with the required columns converted.
    """
    if not os.path.exists(path):
        raise MissingInput("input file %s not found" % path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise SchemaViolation("%s: empty file without header" % path)
    for column in columns:
        if column not in frame.columns:
            raise SchemaViolation("%s: missing column %s" % (path, column))
    frame = frame[list(columns)].copy()
    for column, kind in (dtypes or {}).items():
        values = []
        for row, raw in enumerate(frame[column]):
            raw = raw.strip()
            if raw == "":
                raise SchemaViolation("%s: row %s column %s is empty" % (path, row + 2, column))
            try:
                if kind == "int":
                    value = int(raw)
                elif kind == "float":
                    value = float(raw)
                elif kind == "bool":
                    if raw.lower() not in ("1", "0", "true", "false"):
                        raise ValueError(raw)
                    value = raw.lower() in ("1", "true")
                else:
                    value = raw
            except ValueError:
                raise SchemaViolation("%s: row %s column %s invalid value %s" % (path, row + 2,
                                                                               column, raw))
            values.append(value)
        frame[column] = pd.Series(values, index=frame.index, dtype=object)
    return frame


def write_table(path, rows, columns):
    """
    Write rows (list of tuples or dicts) to CSV with header.
    """
    frame = pd.DataFrame(list(rows), columns=list(columns))
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
