#!/usr/bin/env python3
"""Reproduce all figure data files (CSV + SVG) into out/figures."""

import subprocess
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "out" / "figures"


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    for preset in ("fig1", "fig2", "fig3", "fig4", "fig5", "fig6"):
        cmd = [sys.executable, "-m", "selfrepel.cli", "--seed", "7",
               "--out-dir", str(OUT), "figures", "--preset", preset]
        print(" ".join(cmd), flush=True)
        subprocess.run(cmd, check=True)
    print(f"wrote {len(list(OUT.iterdir()))} files under {OUT}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
