"""Entry point for ``python -m sparse_select``."""

from .cli import main

if __name__ == "__main__":
    main()
