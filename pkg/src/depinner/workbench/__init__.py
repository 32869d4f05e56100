"""File formats, synthetic data and the command-line interface."""
