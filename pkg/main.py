from __future__ import annotations

"""
Entry point of the conluio command line.
- `conluio <subcommand> [flags]` (see `cli.app`).
- Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.
"""

import sys

from cli.app import run


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
