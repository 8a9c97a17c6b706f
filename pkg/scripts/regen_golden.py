"""Rewrite tests/golden/*.txt from the current CLI output.

Only run this after the oracle tests pass; the golden files pin behaviour, they do not prove it.
"""

import io
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from golden_cases import EXACT, NUMERIC  # noqa: E402

from cusptransfer.cli import run  # noqa: E402


def main():
    out_dir = ROOT / "tests" / "golden"
    out_dir.mkdir(exist_ok=True)
    for name, argv in {**EXACT, **NUMERIC}.items():
        buf = io.StringIO()
        code = run(argv, buf, io.StringIO())
        (out_dir / f"{name}.txt").write_text(f"# exit={code}\n" + buf.getvalue())
        print(f"{name}: exit {code}")


if __name__ == "__main__":
    main()
