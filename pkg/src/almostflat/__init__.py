"""Exact diameters of finite coset spaces of polycyclic groups.

Heisenberg quotients and coset spaces, semidirect products Z^n x| Z^m with
their index-p subgroups, lattice and finite-field arithmetic, and a batch CLI
for sweeping families and fitting almost-flat exponents.
"""

__version__ = "0.1.0"
