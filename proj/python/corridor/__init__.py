"""Signal-plan optimisation: fact-file parsing, simulation and search."""

try:
    from corridor._corridor import *  # noqa: F401,F403  (installed layout)
except ImportError:
    from _corridor import *  # noqa: F401,F403  (build tree on PYTHONPATH)
