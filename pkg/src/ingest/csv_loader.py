"""Load user,item,rating CSV logs (UTF-8, optional header line)."""

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np
import pandas as pd

from core.errors import IoError, ParseError
from utils.logger import get_logger

logger = get_logger(__name__)

COLUMNS = ["user_id", "item_id", "rating"]

# "Error tokenizing data. C error: Expected 3 fields in line 4, saw 5"
_LINE_IN_MESSAGE = re.compile(r"\bline (\d+)\b")


@dataclass(frozen=True, eq=False)
class RawRatingsFile:
    """Parsed rating records; ids are opaque strings, ratings finite floats."""
    records: pd.DataFrame

    @classmethod
    def from_records(cls, records: Iterable[tuple[str, str, float]]) -> "RawRatingsFile":
        frame = pd.DataFrame(list(records), columns=COLUMNS)
        frame["user_id"] = frame["user_id"].astype(str)
        frame["item_id"] = frame["item_id"].astype(str)
        frame["rating"] = frame["rating"].astype(np.float64)
        return cls(frame)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[tuple[str, str, float]]:
        for user, item, rating in self.records[COLUMNS].itertuples(index=False, name=None):
            yield user, item, float(rating)


def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _parser_error_line(error: Exception, path: Path) -> Optional[int]:
    """1-based line of a tokenizer failure, from the pandas message or by re-scanning the file."""
    match = _LINE_IN_MESSAGE.search(str(error))
    if match:
        return int(match.group(1))
    expected = None
    with path.open(encoding="utf-8", newline="") as handle:
        for number, fields in enumerate(csv.reader(handle), start=1):
            if not fields:
                continue
            if expected is None:
                expected = len(fields)
            elif len(fields) > expected:
                return number
    return None


def load_csv(path: str | Path) -> RawRatingsFile:
    """Read a ratings log, one record per data line.

    The first line is treated as a header when its third field isn't numeric.

    Raises:
        IoError: If the file can't be read.
        ParseError: With the 1-based line number of the first bad line.
    """
    path = Path(path).expanduser()
    if not path.is_file():
        raise IoError(f"Ratings file not found: {path}")

    try:
        raw = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        logger.warning(f"Ratings file {path} is empty")
        return RawRatingsFile.from_records([])
    except pd.errors.ParserError as e:
        raise ParseError(f"Malformed CSV in {path}: {str(e).strip()}", line=_parser_error_line(e, path)) from e
    except (OSError, UnicodeDecodeError) as e:
        raise IoError(f"Failed to read {path}: {e}") from e

    raw.index = np.arange(1, len(raw) + 1)  # file line numbers
    if raw.shape[1] != 3:
        raise ParseError(f"Expected 3 fields (user,item,rating), found {raw.shape[1]}", line=1)
    raw.columns = COLUMNS
    raw = raw.fillna("").apply(lambda col: col.str.strip())

    blank = (raw == "").all(axis=1)
    raw = raw[~blank]
    if raw.empty:
        return RawRatingsFile.from_records([])

    if not _is_number(raw["rating"].iloc[0]):
        logger.debug(f"Skipping header line of {path}: {list(raw.iloc[0])}")
        raw = raw.iloc[1:]

    ratings = pd.to_numeric(raw["rating"], errors="coerce")
    bad = ~np.isfinite(ratings.to_numpy(dtype=np.float64))
    bad |= (raw["user_id"] == "").to_numpy() | (raw["item_id"] == "").to_numpy()
    if bad.any():
        line = int(raw.index[np.argmax(bad)])
        row = raw.loc[line]
        raise ParseError(
            f"Invalid record user={row['user_id']!r} item={row['item_id']!r} rating={row['rating']!r}",
            line=line,
        )

    records = pd.DataFrame({
        "user_id": raw["user_id"].to_numpy(),
        "item_id": raw["item_id"].to_numpy(),
        "rating": ratings.to_numpy(dtype=np.float64),
    })
    logger.info(f"Loaded {len(records)} ratings from {path}")
    return RawRatingsFile(records)
