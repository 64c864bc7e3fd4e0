"""Excess-one covering configuration spaces of grid domains."""
from .assembly import build_covering_complex, predicted_cell_counts, predicted_euler
from .cellcomplex import CellComplex, Kind, euler_characteristic
from .errors import GridCovError, InputError, ResourceLimit
from .griddomain import GridDomain, crossings, domain_summary, parse_domain, patrol_region
from .homology import betti, integral_h1_torsion
from .morse import build_matching, free_collapse_schedule, morse_complex, verify_matching

__version__ = "0.1.0"

__all__ = [
    "CellComplex", "Kind", "euler_characteristic", "GridCovError", "InputError",
    "ResourceLimit", "GridDomain", "crossings", "domain_summary", "parse_domain",
    "patrol_region", "build_covering_complex", "predicted_cell_counts", "predicted_euler",
    "betti", "integral_h1_torsion", "build_matching", "free_collapse_schedule",
    "morse_complex", "verify_matching", "__version__",
]
