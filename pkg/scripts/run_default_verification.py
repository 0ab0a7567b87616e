#!/usr/bin/env python3
"""Run the full default verification suite (unit icosphere, level 5).

Writes report.json next to this script unless an output path is given.
Equivalent to `hodgelab verify --out report.json`.
"""

import json
import sys
from pathlib import Path

from hodgelab.cli import _format_report_table
from hodgelab.config import default_config
from hodgelab.verify import run_suite


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("report.json")
    report = run_suite(default_config())
    out.write_text(json.dumps(report, indent=1, default=float) + "\n")
    print(_format_report_table(report))
    print(f"report written to {out}")
    return 0 if report["pass"] else 2


if __name__ == "__main__":
    raise SystemExit(main())
