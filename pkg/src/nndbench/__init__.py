"""Neural network decoders for short polar codes, benchmarked against MAP decoding."""

__version__ = "0.1.0"
