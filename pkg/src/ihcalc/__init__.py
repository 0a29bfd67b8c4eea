"""Intersection homology and tame intersection homology of filtered simplicial complexes."""
from .complex_core import FilteredComplex, build_complex
from .perversity import Perversity, make_perversity
from .rings import QQ, ZZ, PrimeField, parse_ring

__version__ = "0.1.0"
