"""Subcommand handlers. Each takes a RunConfig and returns (rendered output, exit code)."""
