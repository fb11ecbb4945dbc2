"""Liouville Fock state lattices for Lindblad generators."""
