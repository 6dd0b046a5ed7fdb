import json
import logging
import pathlib
import sys
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

logger = logging.getLogger(__name__)


def _target(out: Optional[str]) -> Optional[pathlib.Path]:
    if not out or out == "-":
        return None
    path = pathlib.Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(header: Sequence[str], rows: List[List[str]], out: Optional[str] = None) -> None:
    """Write string rows as CSV to `out`, or to stdout. The header row is always written."""
    df = pd.DataFrame(rows, columns=list(header), dtype=str)
    path = _target(out)
    if path is None:
        df.to_csv(sys.stdout, index=False, lineterminator="\n")
        return
    df.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"report saved to: {path}")


def write_json(report: Dict[str, Any], out: Optional[str] = None) -> None:
    """Pretty-printed JSON with sorted keys, so identical reports are identical bytes."""
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    path = _target(out)
    if path is None:
        sys.stdout.write(text)
        return
    path.write_text(text)
    logger.info(f"report saved to: {path}")
