"""
GeoPursuit
Entry point script.
"""
import sys
import traceback
from pathlib import Path

# Add project root to sys.path
SCRIPT_DIR = Path(__file__).parent
sys.path.append(str(SCRIPT_DIR))

from core.cli import parse_run_spec
from core.config import load_config_to_env
from core.logger import log
from core.runner import run
from utils.system.error_handler import GeoPursuitError
from utils.system.ui import console


def main(argv=None):
    """Main entry point; returns the exit status"""
    load_config_to_env()
    try:
        spec = parse_run_spec(sys.argv[1:] if argv is None else argv)
        return run(spec)
    except GeoPursuitError as e:
        e.display()
        return e.exit_code


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        console.print("\n\n[Process cancelled by user]")
        sys.exit(130)
    except Exception:
        log.critical("Unhandled exception occurred:")
        log.critical(traceback.format_exc())
        console.print_exception(show_locals=False)
        sys.exit(1)
