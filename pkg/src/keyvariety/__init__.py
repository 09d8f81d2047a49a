"""Exact finite-field verification of the extended mid point varieties
behind five families of prime Q-Fano 3-folds: point counts, dimensions,
singular loci as rank loci, resolution fiber dichotomies, degree and genus
numerology, and divisor-class identities."""

__version__ = "0.1.0"

from .algebra import (ParseError, OffVarietyError, PointAffineRep, Polynomial,
                      SmallPrime, eval_poly, jacobian_rank, matrix_rank_mod_p,
                      parse_poly)
from .catalog import (ALL_CASES, MAIN_CASES, VarietySpec, build_case,
                      normalize_pairing, plane_containment_check,
                      plucker_ideal, rank_locus_member, spec_dump)
from .incidence import (FiberReport, fiber_over, linalg_equiv_check,
                        subspace_from_plucker)
from .invariants import (DimensionEstimate, SingularScanReport, ci_degree,
                         estimate_dimension, grassmann_degree, singular_scan)
from .numerology import (ClassLattice, case_table_check, normal_bundle_ledger,
                         run_ledger, verify_identity)
from .projspace import (ScanPlan, ScanResult, enumerate_points,
                        proj_point_count, scan)
from .sections import SectionSpec, cut, section_report

__all__ = [name for name in dir() if not name.startswith("_")]
