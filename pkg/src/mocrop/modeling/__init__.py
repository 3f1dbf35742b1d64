"""Modeling layer: search the density map and map boxes back onto frames."""
