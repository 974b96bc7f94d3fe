import io
import json
import math

import numpy as np
import pandas as pd

from .errors import FileFormatError
from .filesystem import atomic_open


class JsonWrapper:
    @classmethod
    def dump(self, data, filepath):
        with atomic_open(filepath, "w") as f:
            f.write(JsonWrapper.dumps(data))
            f.write("\n")

    @classmethod
    def load(self, filepath):
        with open(filepath, encoding="utf-8") as f:
            return json.load(f)

    @classmethod
    def dumps(self, data):
        return json.dumps(data, indent=2, ensure_ascii=False)

    @classmethod
    def loads(self, data):
        return json.loads(data)


def format_cell(value):
    """Serialize one CSV cell.

    Reals use the shortest decimal string that round-trips (``repr``); ``None`` and NaN become empty cells."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def csv_text(rows, columns):
    """Render ``rows`` (iterable of dicts) as CSV text with ``\\n`` line endings and a trailing newline."""
    frame = pd.DataFrame(
        [[format_cell(row.get(column)) for column in columns] for row in rows],
        columns=columns,
        dtype=object,
    )
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def write_csv(filepath, rows, columns):
    """Atomically write ``rows`` to ``filepath``. Returns the file path."""
    text = csv_text(rows, columns)
    with atomic_open(filepath, "w") as f:
        f.write(text)
    return filepath


def read_csv_table(filepath, columns, optional=()):
    """Read a CSV file as a list of string-valued dicts.

    The header must contain every name in ``columns`` and nothing outside ``columns`` and ``optional``. Raises ``OSError`` if the file can't be read, ``FileFormatError`` if it can't be parsed or the header is wrong."""
    try:
        frame = pd.read_csv(
            filepath, dtype=str, keep_default_na=False, skipinitialspace=True
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise FileFormatError("Can't parse CSV file {}: {}".format(filepath, e))
    header = [str(x).strip() for x in frame.columns]
    missing = [x for x in columns if x not in header]
    extra = [x for x in header if x not in columns and x not in optional]
    if missing or extra:
        raise FileFormatError(
            "CSV file {} has header {}; expected {}".format(
                filepath, ",".join(header), ",".join(columns)
            )
        )
    frame.columns = header
    return [
        {key: str(value).strip() for key, value in record.items()}
        for record in frame.to_dict(orient="records")
    ]
