"""Command-line interface for subdecode."""
