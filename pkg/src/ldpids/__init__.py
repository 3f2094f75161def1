"""w-event local differential privacy mechanisms for infinite streams."""
__version__ = "0.1.0"
