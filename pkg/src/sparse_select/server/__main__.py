"""Entry point for the sparse-select MCP server."""

from .runtime import main

if __name__ == "__main__":
    main()
