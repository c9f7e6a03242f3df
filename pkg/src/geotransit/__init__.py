"""Hyperbolic / half-pipe / anti de Sitter transition toolkit."""
