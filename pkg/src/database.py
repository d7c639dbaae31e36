"""SQLite persistence of sweep tables.

Each sweep is stored as one table, one row per tile index n. Tables are
appended to, so repeated runs under the same name accumulate; `load_report`
keeps the last row for every n.
"""

import logging
import os
import re
import sqlite3

import pandas as pd

from src.exceptions import *
from src.report_frame import LABEL_COLUMNS, REPORT_COLUMNS, ReportFrame

logger = logging.getLogger(__name__)

DEFAULT_DB = "data/reports.db"

_TABLE_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _check_table_name(table_name: str) -> None:
    if not _TABLE_NAME.match(table_name):
        raise ValidationError(f"table: {table_name!r} is not a valid table name")


def save_report(
        table_name: str,
        frame: ReportFrame,
        db_path: str = DEFAULT_DB
        ) -> None:
    """Appends a sweep table to the SQLite database.

    Counts are stored as text since they can exceed 64 bits.

    Args:
        table_name (str): The table to append to; created when missing.
        frame (ReportFrame): The sweep rows.
        db_path (str, optional): Path to the database file.
            Defaults to 'data/reports.db'.

    Raises:
        ValidationError: If the table name is not a plain identifier.
    """

    _check_table_name(table_name)
    directory = os.path.dirname(db_path)
    if directory:
        os.makedirs(directory, exist_ok=True)

    stored = pd.DataFrame(frame.records(), columns=REPORT_COLUMNS + LABEL_COLUMNS)
    stored["count"] = stored["count"].astype(str)
    with sqlite3.connect(db_path) as connection:
        stored.to_sql(table_name, connection, if_exists="append", index=False)
        connection.commit()
    logger.info("saved %d rows to %s:%s", len(stored), db_path, table_name)


def load_report(
        table_name: str,
        db_path: str = DEFAULT_DB
        ) -> ReportFrame:
    """Reads a sweep table back, keeping the last row stored for each n.

    Raises:
        ValidationError: If the table name is invalid or the table is missing.
    """

    _check_table_name(table_name)
    if table_name not in get_existing_reports(db_path):
        raise ValidationError(f"table: no report named {table_name!r} in {db_path}")
    with sqlite3.connect(db_path) as connection:
        df = pd.read_sql_query(f"SELECT * FROM {table_name}", connection)

    df = df.drop_duplicates(subset=["n"], keep="last")
    rows = []
    for record in df.to_dict(orient="records"):
        record["count"] = int(record["count"])
        for column in ("seed", "samples"):
            value = record.get(column)
            record[column] = None if value is None or pd.isna(value) else int(value)
        rows.append(record)
    return ReportFrame.from_rows(rows)


def get_existing_reports(db_path: str = DEFAULT_DB) -> list[str]:
    """Lists the report tables in the database, sorted; empty if there is no file."""

    if not os.path.exists(db_path):
        return []
    try:
        with sqlite3.connect(db_path) as connection:
            cursor = connection.cursor()
            cursor.execute("SELECT name FROM sqlite_master WHERE type='table';")
            tables = cursor.fetchall()
            return sorted(t[0] for t in tables if not t[0].startswith("sqlite_"))
    except sqlite3.Error as e:
        logger.warning("cannot list reports in %s: %s", db_path, e)
        return []
