"""
Report Service

Builds command reports and serialises them deterministically: JSON with a
fixed key order, or CSV for tabular results. Identical inputs always give
identical bytes unless timing is switched on.
"""
import csv
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Optional

from config import Config
from models import Report, jsonable

logger = logging.getLogger(__name__)

FORMATS = ('json', 'csv')


def build_report(command: str, parameters: Dict[str, Any], results: Dict[str, Any],
                 timing: Optional[float] = None, exit_code: int = 0) -> Report:
    """Wrap a result payload with the tool identity; timing is kept only when REPORT_TIMING is on."""
    return Report(
        command=command,
        parameters={key: jsonable(value) for key, value in parameters.items()},
        results=results,
        tool=Config.TOOL_NAME,
        version=Config.VERSION,
        timing=timing if Config.REPORT_TIMING else None,
        exit_code=exit_code,
    )


def error_report(command: str, parameters: Dict[str, Any], message: str, code: str, exit_code: int) -> Report:
    return build_report(command, parameters, {'error': True, 'message': message, 'code': code},
                        exit_code=exit_code)


def emit_report(report: Report, fmt: str = 'json') -> bytes:
    """
    Serialise a report.

    Args:
        report: Complete report
        fmt: json (whole report) or csv (results['table'] when present,
            otherwise one key,value row per scalar result)

    Returns:
        UTF-8 bytes ending in a newline
    """
    if fmt == 'json':
        return (json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + '\n').encode('utf-8')
    if fmt != 'csv':
        raise ValueError(f'unknown report format {fmt!r}; expected one of {FORMATS}')

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    table = report.results.get('table')
    if isinstance(table, list) and table and isinstance(table[0], dict):
        columns = list(table[0])
        writer.writerow(columns)
        for row in table:
            writer.writerow([_cell(row.get(c)) for c in columns])
    else:
        writer.writerow(['key', 'value'])
        for key, value in report.results.items():
            writer.writerow([key, _cell(value)])
    return buffer.getvalue().encode('utf-8')


def _cell(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(',', ':'))
    return str(value)


def write_atomic(path: str, data: bytes):
    """Write a file in one step: a temporary sibling replaced into place."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=str(target.parent), prefix=f'.{target.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'wb') as handle:
            handle.write(data)
        os.replace(tmp, target)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f'Wrote {len(data)} bytes to {target}')
