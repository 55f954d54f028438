"""
resource-forge - convex resource theories over general probabilistic theories.

Robustness measures are lowered to conic programs, solved by a built-in
operator-splitting solver, and their dual witnesses are turned into the
discrimination tasks and conversion certificates that realize them.
"""

__version__ = "1.0.0"
