"""Dense linear algebra helpers."""
