def rel(a, b):
    """Relative difference with a floor at the larger magnitude."""
    a, b = complex(a), complex(b)
    return abs(a - b) / max(abs(a), abs(b), 1e-300)
