"""Entry point for the folner-brudno command-line tool.

Forwards the command-line arguments to `src.cli.main` and exits with its status.
"""

import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
