"""Two-way matrix reordering: a neural encoder/decoder method plus spectral baselines."""

__version__ = "0.1.0"
