"""Allow running the CLI with ``python -m mocrop``."""

from mocrop.cli import main

raise SystemExit(main())
