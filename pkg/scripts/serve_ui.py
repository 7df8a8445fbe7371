#!/usr/bin/env python3
"""Run the proof server with the browser UI mounted on the same port.

Builds nothing itself: point --ui-dir at frontend/dist after building the
frontend (see frontend/README.md), then open http://localhost:<port>/.
"""

import argparse
import os
import sys

from cur_kernel.server import serve


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--port", type=int, default=8787)
    parser.add_argument(
        "--ui-dir",
        default=os.path.join(os.path.dirname(__file__), "..", "frontend", "dist"),
    )
    args = parser.parse_args()
    ui = os.path.abspath(args.ui_dir)
    if not os.path.isdir(ui):
        print(f"warning: UI directory {ui} not found; serving protocol only", file=sys.stderr)
        ui = None
    print(f"serving on http://127.0.0.1:{args.port}/ (ui: {ui or 'none'})")
    serve(args.port, ui_dir=ui)
    return 0


if __name__ == "__main__":
    sys.exit(main())
