import sys

from src.adapters.cli.cli_adapter import dispatch

if __name__ == "__main__":
    sys.exit(dispatch())
