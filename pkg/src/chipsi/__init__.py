"""Cross-checks between Clauser-Horne bounds, uncertainty relations and
correlation polytopes."""

__version__ = "0.1.0"
