"""dynbundle - functorial differentiation and coalgebraic dynamics from the command line."""

__version__ = "0.3.0"
