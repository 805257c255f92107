"""Complex covariant macroscopic electrodynamics: field algebra, balance laws,
Lorentz boosts, moving media, Hertz potentials and Lagrangians, with a
residual-based verification runner."""

from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("artifact")
except _metadata.PackageNotFoundError:  # pragma: no cover - running from a source tree
    __version__ = "0.0.0"
