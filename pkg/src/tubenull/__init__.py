"""Explicit tube covers for digit-restricted self-similar sets."""

from .certify import CertifierConfig, DirectionCertificate, delta_star, direction_search, grid_oracle, objective
from .cover import CoverCertificate, Slab, assign_direction, build_cover, required_level, slab_for, subdivide_slab
from .digits import DigitSystem, Word, carpet, menger_sponge, validate_system, word
from .projection import Direction, canonicalize, projected_alphabet, projected_position
from .reduction import GraphDirectedSystem, occupied_cells, reduce_to_digit_system, symmetrize
from .verify import decay_report, verify_containment, verify_sampling, verify_width

__version__ = "0.1.0"
