"""polyscat: forward models and corner asymptotics for convex polygonal scatterers."""

__version__ = "0.1.0"
