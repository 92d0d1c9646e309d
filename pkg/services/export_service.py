# services/export_service.py
"""
Export Service

Serializes scan rows, speed-limit results and density matrices as CSV, JSON
or SVG. Numbers are written locale-independently; identical inputs give
byte-identical output.
"""

import csv
import io
import json
import logging
from typing import Any, Dict, Optional, Sequence

import click
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from models import DensityMatrix, ScanRow, rows_columns  # noqa: E402

logger = logging.getLogger(__name__)

CSV_DIGITS = 12
SCIENTIFIC_BELOW = 1e-5
SVG_HASH_SALT = 'qslchan'


def format_number(value: Any) -> str:
    """
    Text with CSV_DIGITS significant digits; None becomes an empty cell.

    Magnitudes below SCIENTIFIC_BELOW are written in scientific notation so
    small values keep their digits.
    """
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    value = float(value)
    if value == 0.0:
        return '0.' + '0' * (CSV_DIGITS - 1)  # also drops the sign of -0.0
    if abs(value) < SCIENTIFIC_BELOW:
        return np.format_float_scientific(value, precision=CSV_DIGITS - 1, unique=False, trim='k')
    return np.format_float_positional(value, precision=CSV_DIGITS, unique=False, fractional=False, trim='k')


def rows_to_csv(rows: Sequence[ScanRow]) -> str:
    """Header row plus one line per ScanRow, comma-separated, '\\n' line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    columns = rows_columns(rows)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row.values[column]) for column in columns])
    return buffer.getvalue()


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    return value


def to_json(payload: Any) -> str:
    """Indented JSON with a trailing newline; key order is insertion order."""
    return json.dumps(_jsonable(payload), indent=2) + '\n'


def rows_to_json(rows: Sequence[ScanRow]) -> str:
    return to_json([row.values for row in rows])


def density_report(rho: DensityMatrix, discrepancy: Optional[float] = None) -> Dict[str, Any]:
    """Real and imaginary parts plus trace, smallest eigenvalue and Kraus/closed-form discrepancy."""
    report = {
        'real': rho.m.real.tolist(),
        'imag': rho.m.imag.tolist(),
        'trace': rho.trace(),
        'min_eigenvalue': rho.min_eigenvalue(),
        'purity': rho.purity()
    }
    if discrepancy is not None:
        report['max_discrepancy'] = discrepancy
    return report


def density_to_csv(report: Dict[str, Any]) -> str:
    """Matrix block (row, col, real, imag) followed by the scalar diagnostics."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['row', 'col', 'real', 'imag'])
    for i, (real_row, imag_row) in enumerate(zip(report['real'], report['imag'])):
        for j, (re, im) in enumerate(zip(real_row, imag_row)):
            writer.writerow([i, j, format_number(re), format_number(im)])
    writer.writerow([])
    writer.writerow(['quantity', 'value'])
    for key in ('trace', 'min_eigenvalue', 'purity', 'max_discrepancy'):
        if key in report:
            writer.writerow([key, format_number(report[key])])
    return buffer.getvalue()


def record_to_csv(record: Dict[str, Any]) -> str:
    """Flat key/value CSV for a single result."""
    flat: Dict[str, Any] = {}
    for key, value in record.items():
        if isinstance(value, dict):
            for sub_key, sub_value in value.items():
                flat[f"{key}_{sub_key}"] = sub_value
        elif isinstance(value, (list, tuple)):
            for i, item in enumerate(value):
                flat[f"{key}_{i}"] = item
        else:
            flat[key] = value
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(list(flat.keys()))
    writer.writerow([v if isinstance(v, str) else format_number(v) for v in flat.values()])
    return buffer.getvalue()


def rows_to_svg(rows: Sequence[ScanRow], title: str = '') -> str:
    """
    Line plot with one path per data column against the first column.

    Rendered with matplotlib's SVG backend; the hash salt is fixed and the date
    metadata removed so the file is reproducible.
    """
    columns = rows_columns(rows)
    if not columns:
        return ''
    x_name, y_names = columns[0], columns[1:]
    x = np.array([row.values[x_name] for row in rows], dtype=float)

    with plt.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        try:
            for name in y_names:
                y = np.array([np.nan if row.values[name] is None else float(row.values[name]) for row in rows])
                ax.plot(x, y, label=name, linewidth=1.2)
            ax.set_xlabel(x_name)
            ax.set_ylabel('value')
            if title:
                ax.set_title(title)
            ax.legend(loc='best', frameon=False)
            buffer = io.StringIO()
            fig.savefig(buffer, format='svg', metadata={'Date': None})
        finally:
            plt.close(fig)
    return buffer.getvalue()


def render_rows(rows: Sequence[ScanRow], fmt: str, title: str = '') -> str:
    if fmt == 'csv':
        return rows_to_csv(rows)
    if fmt == 'json':
        return rows_to_json(rows)
    if fmt == 'svg':
        return rows_to_svg(rows, title)
    raise ValueError(f"Unsupported format '{fmt}'")


def write_output(text: str, out_path: Optional[str]) -> None:
    """Write to a file in one call, or to standard output when no path is given."""
    if out_path is None or out_path == '-':
        click.echo(text, nl=False)
        return
    with open(out_path, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    logger.info(f"Wrote {len(text)} characters to {out_path}")
