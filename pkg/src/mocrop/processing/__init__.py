"""Processing layer: denoise motion vectors and turn them into a density map."""
