"""Exact phase bookkeeping for quantum Teichmüller intertwiners over the
symplectic Ptolemy groupoid of a punctured surface."""

__version__ = "0.1.0"
SCHEMA_VERSION = "1"
