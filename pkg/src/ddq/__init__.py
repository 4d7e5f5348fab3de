"""ddq: exact verifier for classical Drinfel'd doubles and their quantizations."""

__version__ = "0.1.0"
