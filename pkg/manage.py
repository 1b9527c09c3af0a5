#!/usr/bin/env python
"""qfbounds command-line utility."""
import sys


def main():
    """Run qfbounds commands."""
    try:
        from qfbounds.cli import cli
    except ImportError as exc:
        raise ImportError(
            "Couldn't import qfbounds. Are its dependencies installed "
            "(pip install -r requirements.txt) and is this directory on your "
            "PYTHONPATH?"
        ) from exc
    cli(args=sys.argv[1:], prog_name="manage.py")


if __name__ == '__main__':
    main()
