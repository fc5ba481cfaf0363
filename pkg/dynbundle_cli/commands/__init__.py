"""CLI commands for dynbundle."""
