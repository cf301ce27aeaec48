"""fhzip - fronthaul compression of RB-wise downlink precoders.

This package provides:
- Domain models for channels, precoders, codec artifacts and reports
- Repository abstractions for files, configuration and binary containers
- Services for channel generation, WMMSE precoding, the transform + residual
  VQ + entropy codec, and rate/distortion evaluation
- Dependency injection infrastructure
- CLI entry point for command-line usage
"""

from .cli import cli, main

__all__ = ["cli", "main"]
