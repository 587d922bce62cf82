# CLI verb routers
