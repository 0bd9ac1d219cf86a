"""HTTP service and shared request handlers."""
