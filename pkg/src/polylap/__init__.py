"""polylap: discrete Laplace operators of cyclic polygons and triangulations."""

from . import cli, cyclic, errors, extremum, mesh, spectrum

__all__ = ["cyclic", "mesh", "spectrum", "extremum", "cli", "errors"]
