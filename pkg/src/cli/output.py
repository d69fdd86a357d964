"""
Terminal tables and artifact files for the command-line front end
"""

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from colorama import Fore, Style

from ..algebra.matrix import MatrixFq, save_matrix
from ..models.report import fraction_dict


def format_value(value: Any) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f'{value.numerator}/{value.denominator} ({float(value):.4f})'
    if value is None:
        return '-'
    if isinstance(value, bool):
        return 'yes' if value else 'no'
    return str(value)


def status(ok: bool) -> str:
    if ok:
        return f'{Fore.GREEN}PASS{Style.RESET_ALL}'
    return f'{Fore.RED}FAIL{Style.RESET_ALL}'


def table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Left-aligned plain-text table; colour codes do not count towards widths"""
    def visible(text: str) -> int:
        for code in (Fore.GREEN, Fore.RED, Fore.YELLOW, Style.RESET_ALL, Style.BRIGHT):
            text = text.replace(code, '')
        return len(text)

    widths = [visible(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], visible(cell))

    def line(cells: Sequence[str]) -> str:
        return '  '.join(c + ' ' * (w - visible(c)) for c, w in zip(cells, widths)).rstrip()

    out = [Style.BRIGHT + line(headers) + Style.RESET_ALL, line(['-' * w for w in widths])]
    out += [line(row) for row in rows]
    return '\n'.join(out)


def summary(title: str, items: Dict[str, Any]) -> str:
    width = max((len(k) for k in items), default=0)
    lines = [f'{Style.BRIGHT}{title}{Style.RESET_ALL}']
    lines += [f'  {key.ljust(width)}  {format_value(value)}' for key, value in items.items()]
    return '\n'.join(lines)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return fraction_dict(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


def write_json(path: Path, payload: Any):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + '\n')


def write_artifacts(out: Optional[Path], result: Optional[MatrixFq], report: Dict[str, Any],
                    extra: Optional[Dict[str, Any]] = None) -> List[Path]:
    """result.json, report.json and any extra JSON documents under out"""
    if out is None:
        return []
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if result is not None:
        save_matrix(result, out / 'result.json')
        written.append(out / 'result.json')
    write_json(out / 'report.json', report)
    written.append(out / 'report.json')
    for name, payload in (extra or {}).items():
        write_json(out / name, payload)
        written.append(out / name)
    return written


def write_cost_csv(path: Path, rows: Sequence[Dict[str, Any]]):
    """Exact fractions, one column per scheme"""
    path.parent.mkdir(parents=True, exist_ok=True)
    headers = list(rows[0]) if rows else []
    with open(path, 'w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(headers)
        for row in rows:
            writer.writerow(['' if row[h] is None else str(row[h]) for h in headers])
