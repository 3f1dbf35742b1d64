"""Output layer: decision text, reports and visual overlays."""
