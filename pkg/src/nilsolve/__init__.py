"""Exact solutions of linear constant-coefficient PDEs via nilpotent algebras."""

__version__ = "0.1.0"
