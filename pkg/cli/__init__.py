"""rv command-line interface."""
