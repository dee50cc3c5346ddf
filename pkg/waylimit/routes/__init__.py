"""Route package for FastAPI routers."""
