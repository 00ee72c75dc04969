"""Entry point for ``python -m digitlaw``."""

from .cli import main

if __name__ == "__main__":
    raise SystemExit(main())
