"""``python -m multicpr`` runs the command-line interface."""
from multicpr.cli import main

raise SystemExit(main())
