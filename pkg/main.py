"""
main.py
=======
Painleve VI verification toolkit
Entry point: run one command and record it in the run log.
"""

import os
import sys

# Add the current directory to the path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from core.cli import main as cli_main
from core.config import ToolkitConfig
from core.event_stream import RunLog


def main(argv=None) -> int:
    """Main entry point"""
    argv = sys.argv[1:] if argv is None else list(argv)
    status, doc = cli_main(argv)
    config = ToolkitConfig()
    if config.run_log_file:
        RunLog(config.run_log_file).record_command(argv, status, doc.summary if doc else None)
    return status


if __name__ == "__main__":
    sys.exit(main())
