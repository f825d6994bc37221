"""Transcript and report writers (CSV / JSON)"""
import csv
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence

from utils.system.error_handler import handle_output_error
from utils.system.ui import print_success

CSV_HEADER = ["i", "Lc1", "Lc2", "Mc1", "Mc2", "D_i", "post_gap"]
SWEEP_HEADER = ["D0", "horizon", "variant", "steps", "final_D_i", "capture_index"]


def format_number(value) -> str:
    """Locale-independent, 17 significant digits"""
    if isinstance(value, (int, bool)) or value is None:
        return "" if value is None else str(int(value))
    return f"{value:.17g}"


def transcript_rows(transcript) -> List[List[str]]:
    """One row per step; the final state closes the table with an empty post_gap"""
    rows = []
    for record, post_gap in zip(transcript.steps, transcript.post_gaps):
        rows.append([str(record.index)]
                    + [format_number(c) for c in record.lion.coordinates()]
                    + [format_number(c) for c in record.man.coordinates()]
                    + [format_number(record.gap), format_number(post_gap)])
    final_index = len(transcript.steps)
    rows.append([str(final_index)]
                + [format_number(c) for c in transcript.final_lion.coordinates()]
                + [format_number(c) for c in transcript.final_man.coordinates()]
                + [format_number(transcript.gaps[-1]), ""])
    return rows


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence[str]]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        handle_output_error(e, path)
    print_success(f"Wrote {path}")
    return path


def write_transcript_csv(transcript, path) -> Path:
    return write_csv(path, CSV_HEADER, transcript_rows(transcript))


def write_sweep_csv(rows: Sequence[Dict[str, Any]], path) -> Path:
    table = [[format_number(row[key]) if not isinstance(row[key], str) else row[key] for key in SWEEP_HEADER]
             for row in rows]
    return write_csv(path, SWEEP_HEADER, table)


def write_json(record: Dict[str, Any], path) -> Path:
    """Sorted keys and no timestamps, so equal runs give equal bytes"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(record, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        handle_output_error(e, path)
    print_success(f"Wrote {path}")
    return path
